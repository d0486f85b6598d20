#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "crashdet/verdict.hpp"

namespace crashdet {

/// Verdict stream: header `t[s],flag,ready;detector=NAME`, then one row per
/// sample with flag and ready as 0/1.
void write_verdicts(std::span<const DetectorVerdict> verdicts, DetectorId detector, std::ostream& out);
/// Score trace for plotting: header `t[s],score,aux;detector=NAME`.
void write_scores(std::span<const DetectorVerdict> verdicts, DetectorId detector, std::ostream& out);

/// Reads a verdict stream; rows must have strictly increasing time.
/// Throws ParseError with the offending line.
std::vector<DetectorVerdict> read_verdicts(std::istream& in);

void write_verdicts(std::span<const DetectorVerdict> verdicts, DetectorId detector,
                    const std::filesystem::path& path);
void write_scores(std::span<const DetectorVerdict> verdicts, DetectorId detector,
                  const std::filesystem::path& path);
std::vector<DetectorVerdict> read_verdicts(const std::filesystem::path& path);

}  // namespace crashdet
