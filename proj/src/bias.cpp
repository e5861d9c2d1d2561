#include "frm/bias.hpp"

#include <algorithm>
#include <numeric>

#include "frm/rng.hpp"

namespace frm {

namespace {

int index_of(const std::vector<std::string>& names, const std::string& name, const char* what) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  throw DataError(std::string(what) + " '" + name + "' not found");
}

}  // namespace

LabeledDataset underrepresentation_filter(const LabeledDataset& data,
                                          const UnderRepresentationSpec& spec) {
  if (spec.keep_prob < 0.0 || spec.keep_prob > 1.0)
    throw ConfigError("underrepresentation_filter: keep_prob outside [0, 1]");
  const int a0 = index_of(data.group_names, spec.target_group, "group");
  const int y1 = index_of(data.label_names, spec.target_label, "label");

  CounterRng rng(spec.seed, 0xb1a5);
  std::vector<std::size_t> keep;
  keep.reserve(data.n);
  for (std::size_t i = 0; i < data.n; ++i) {
    if (data.group[i] == a0 && data.label[i] == y1) {
      if (rng.next_double() < spec.keep_prob) keep.push_back(i);
    } else {
      keep.push_back(i);
    }
  }
  return data.select(keep);
}

GroupMarginal underrepresentation_limit(const GroupMarginal& source,
                                        const std::string& target_group,
                                        const std::string& target_label, double keep_prob) {
  const int a0 = index_of(source.space.groups, target_group, "group");
  const int v1 = index_of(source.space.disc_values, target_label, "label");
  std::vector<double> probs = source.probs;
  probs[source.space.cell(static_cast<std::size_t>(a0), static_cast<std::size_t>(v1))] *= keep_prob;
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (total <= 0.0) throw DataError("underrepresentation_limit: filtered law has no mass");
  for (double& p : probs) p /= total;
  return GroupMarginal(source.space, std::move(probs));
}

std::vector<std::size_t> largest_remainder_counts(const std::vector<double>& shares,
                                                  std::size_t total) {
  std::vector<std::size_t> counts(shares.size(), 0);
  std::vector<std::pair<double, std::size_t>> rema;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double want = shares[i] * static_cast<double>(total);
    counts[i] = static_cast<std::size_t>(want);
    assigned += counts[i];
    rema.emplace_back(want - static_cast<double>(counts[i]), i);
  }
  std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;  // ties keep cell index order
  });
  for (std::size_t k = 0; assigned < total && k < rema.size(); ++k, ++assigned)
    counts[rema[k].second] += 1;
  return counts;
}

ResampleResult reweight_to_marginal(const LabeledDataset& data, const GroupMarginal& target,
                                    std::size_t n_out, std::uint64_t seed) {
  const GroupSpace& space = target.space;
  const bool trivial_v = space.num_disc() == 1;

  std::vector<std::vector<std::size_t>> cell_rows(space.num_cells());
  for (std::size_t i = 0; i < data.n; ++i) {
    const int a = index_of(space.groups, data.group_names[static_cast<std::size_t>(data.group[i])],
                           "group");
    const int v = trivial_v ? 0
                            : index_of(space.disc_values,
                                       data.label_names[static_cast<std::size_t>(data.label[i])],
                                       "label");
    cell_rows[space.cell(static_cast<std::size_t>(a), static_cast<std::size_t>(v))].push_back(i);
  }

  const std::vector<std::size_t> counts = largest_remainder_counts(target.probs, n_out);

  ResampleResult out;
  std::vector<std::size_t> chosen;
  chosen.reserve(n_out);
  for (std::size_t c = 0; c < space.num_cells(); ++c) {
    if (counts[c] == 0) continue;
    auto& rows = cell_rows[c];
    if (rows.empty())
      throw DataError("reweight_to_marginal: target needs cell " + std::to_string(c) +
                      " but the source has no rows there");
    CounterRng rng(derive_seed(seed, {0x5e5a, c}));
    if (counts[c] <= rows.size()) {
      // Partial Fisher-Yates: the first counts[c] slots are a uniform sample.
      for (std::size_t k = 0; k < counts[c]; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.next_below(rows.size() - k));
        std::swap(rows[k], rows[j]);
        chosen.push_back(rows[k]);
      }
    } else {
      out.with_replacement = true;
      for (std::size_t k = 0; k < counts[c]; ++k)
        chosen.push_back(rows[static_cast<std::size_t>(rng.next_below(rows.size()))]);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  out.data = data.select(chosen);
  return out;
}

}  // namespace frm
