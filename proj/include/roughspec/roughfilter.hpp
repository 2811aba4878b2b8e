#pragma once

#include "roughspec/simcore.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace roughspec {

struct ProfileRecord {
  Index doc = 0;
  double avg_top = 0.0;   // mean of the top-q share of the doc's similarities
  double avg_bot = 0.0;   // mean of the bottom-q share
  double avg_diff = 0.0;  // avg_top - avg_bot
};

struct FilterProfile {
  double q = 0.05;
  Index count_per_side = 0;             // ceil(q * (n - 1)), at least 1
  std::vector<ProfileRecord> records;   // indexed by document
  std::vector<Index> sorted_order;      // ascending avg_diff, ties by index
};

/// Per-document top/bottom similarity statistics over the n-1 off-diagonal
/// entries of each row. Requires 0 < q <= 0.5 and n >= 2.
FilterProfile similarity_profile(const SimilarityMatrix& s, double q = 0.05);

struct FilterResult {
  SimilarityMatrix core;       // principal submatrix on `kept`
  std::vector<Index> kept;     // original indices, ascending
  std::vector<Index> removed;  // original indices, ascending
};

/// Keeps exactly the documents with avg_diff >= t. Throws ValidationError if
/// the profile does not match s, t < 0, or nothing would be kept.
FilterResult filter_boundary(const SimilarityMatrix& s, const FilterProfile& profile, double t);

/// Indices with avg_diff < t (no matrix work).
std::vector<Index> removed_at(const FilterProfile& profile, double t);

/// Largest gap between consecutive sorted avg_diff values, scanning gaps that
/// start in the lower half of the documents; returns the value just above the
/// gap, or 0 when there is no gap. Advisory only. Requires n >= 3.
double suggest_threshold(const FilterProfile& profile);

/// CSV rows in ascending avg_diff order: doc_id, avg_top, avg_bot, avg_diff,
/// then one removed_at_<t> column (0/1) per threshold.
void write_profile_csv(const FilterProfile& profile, const SimilarityMatrix& s,
                       std::span<const double> thresholds, const std::filesystem::path& path);

}  // namespace roughspec
