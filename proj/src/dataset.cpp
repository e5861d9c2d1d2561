#include "frm/dataset.hpp"

#include <cmath>
#include <unordered_map>

namespace frm {

void LabeledDataset::validate() const {
  if (features.size() != n * dim) throw ShapeError("LabeledDataset: feature matrix size mismatch");
  if (group.size() != n || label.size() != n) throw ShapeError("LabeledDataset: label column length mismatch");
  for (double x : features) {
    if (!std::isfinite(x)) throw DataError("LabeledDataset: non-finite feature");
  }
  for (int g : group) {
    if (g < 0 || static_cast<std::size_t>(g) >= group_names.size())
      throw DataError("LabeledDataset: group index out of vocabulary");
  }
  for (int y : label) {
    if (y < 0 || static_cast<std::size_t>(y) >= label_names.size())
      throw DataError("LabeledDataset: label index out of vocabulary");
  }
}

LabeledDataset LabeledDataset::select(const std::vector<std::size_t>& rows) const {
  LabeledDataset out;
  out.n = rows.size();
  out.dim = dim;
  out.group_names = group_names;
  out.label_names = label_names;
  out.features.reserve(rows.size() * dim);
  out.group.reserve(rows.size());
  out.label.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= n) throw ShapeError("LabeledDataset::select: row index out of range");
    out.features.insert(out.features.end(), row(r), row(r) + dim);
    out.group.push_back(group[r]);
    out.label.push_back(label[r]);
  }
  return out;
}

GroupSpace space_for(const LabeledDataset& data, FairKind kind) {
  if (kind == FairKind::RiskParity) return GroupSpace(data.group_names, {"all"});
  return GroupSpace(data.group_names, data.label_names);
}

namespace {

// Maps each row to a cell index in `space`, matching by name so datasets and
// spaces with different orderings still line up.
std::vector<std::size_t> row_cells(const LabeledDataset& data, const GroupSpace& space) {
  std::unordered_map<std::string, std::size_t> gidx, vidx;
  for (std::size_t i = 0; i < space.groups.size(); ++i) gidx[space.groups[i]] = i;
  for (std::size_t i = 0; i < space.disc_values.size(); ++i) vidx[space.disc_values[i]] = i;

  const bool trivial_v = space.num_disc() == 1;
  std::vector<std::size_t> group_map(data.group_names.size());
  for (std::size_t g = 0; g < data.group_names.size(); ++g) {
    auto it = gidx.find(data.group_names[g]);
    if (it == gidx.end()) throw DataError("group '" + data.group_names[g] + "' not in space");
    group_map[g] = it->second;
  }
  std::vector<std::size_t> label_map(data.label_names.size(), 0);
  if (!trivial_v) {
    for (std::size_t y = 0; y < data.label_names.size(); ++y) {
      auto it = vidx.find(data.label_names[y]);
      if (it == vidx.end()) throw DataError("label '" + data.label_names[y] + "' not in space");
      label_map[y] = it->second;
    }
  }

  std::vector<std::size_t> cells(data.n);
  for (std::size_t i = 0; i < data.n; ++i)
    cells[i] = space.cell(group_map[data.group[i]], label_map[data.label[i]]);
  return cells;
}

}  // namespace

EmpiricalProfile empirical_risk_profile(const std::vector<double>& row_losses,
                                        const LabeledDataset& data, const GroupSpace& space,
                                        CellPolicy policy) {
  if (row_losses.size() != data.n) throw ShapeError("empirical_risk_profile: loss vector length mismatch");
  const std::vector<std::size_t> cells = row_cells(data, space);

  std::vector<double> sums(space.num_cells(), 0.0);
  std::vector<std::size_t> counts(space.num_cells(), 0);
  for (std::size_t i = 0; i < data.n; ++i) {
    sums[cells[i]] += row_losses[i];
    counts[cells[i]] += 1;
  }

  std::vector<double> means(space.num_cells(), 0.0);
  std::vector<bool> filled(space.num_cells(), true);
  for (std::size_t a = 0; a < space.num_groups(); ++a) {
    for (std::size_t v = 0; v < space.num_disc(); ++v) {
      const std::size_t c = space.cell(a, v);
      if (counts[c] == 0) {
        if (policy == CellPolicy::Strict)
          throw DataError("empty cell (group='" + space.groups[a] + "', v='" +
                          space.disc_values[v] + "') in strict profile estimation");
        filled[c] = false;
      } else {
        means[c] = sums[c] / static_cast<double>(counts[c]);
      }
    }
  }
  return EmpiricalProfile{RiskProfile(space, std::move(means)), std::move(counts), std::move(filled)};
}

GroupMarginal empirical_marginal(const LabeledDataset& data, const GroupSpace& space) {
  if (data.n == 0) throw DataError("empirical_marginal: empty dataset");
  const std::vector<std::size_t> cells = row_cells(data, space);
  std::vector<double> probs(space.num_cells(), 0.0);
  for (std::size_t c : cells) probs[c] += 1.0;
  for (double& p : probs) p /= static_cast<double>(data.n);
  return GroupMarginal(space, std::move(probs));
}

}  // namespace frm
