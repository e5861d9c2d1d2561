#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frm/dataset.hpp"
#include "frm/types.hpp"

namespace frm {

// Under-representation bias: rows from one (group, label) cell are kept
// independently with probability keep_prob; everything else survives. The
// limiting joint is the source joint damped on that cell and renormalized.
struct UnderRepresentationSpec {
  std::string target_group;
  std::string target_label;
  double keep_prob = 1.0;  // per-row retention probability, in [0, 1]
  std::uint64_t seed = 0;
};

LabeledDataset underrepresentation_filter(const LabeledDataset& data,
                                          const UnderRepresentationSpec& spec);

// The analytic filtered joint over (A, Y) for a given source joint.
GroupMarginal underrepresentation_limit(const GroupMarginal& source,
                                        const std::string& target_group,
                                        const std::string& target_label, double keep_prob);

struct ResampleResult {
  LabeledDataset data;
  bool with_replacement = false;  // set when some cell had fewer rows than requested
};

// Stratified resampling to hit cell counts from largest-remainder rounding
// of n_out * target. Without replacement where the source allows it; with
// replacement (flagged) otherwise. Cells the target needs must be non-empty.
ResampleResult reweight_to_marginal(const LabeledDataset& data, const GroupMarginal& target,
                                    std::size_t n_out, std::uint64_t seed);

// Cell counts from largest-remainder rounding; ties broken by cell index.
std::vector<std::size_t> largest_remainder_counts(const std::vector<double>& shares,
                                                  std::size_t total);

}  // namespace frm
