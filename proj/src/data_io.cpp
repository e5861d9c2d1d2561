#include "frm/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "frm/bias.hpp"
#include "frm/rng.hpp"

namespace frm {

namespace {

// ---- small dense Cholesky ----

std::vector<double> cholesky_spd(const std::vector<double>& a, std::size_t d, const char* what) {
  std::vector<double> l(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
      if (i == j) {
        if (s <= 0.0) throw DataError(std::string(what) + ": covariance not positive definite");
        l[i * d + i] = std::sqrt(s);
      } else {
        l[i * d + j] = s / l[j * d + j];
      }
    }
  }
  return l;
}

// ---- RFC-4180-style CSV ----

std::vector<std::vector<std::string>> parse_csv(const std::string& text, const std::string& path) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t line = 1;

  auto end_field = [&]() {
    record.push_back(field);
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&]() {
    end_field();
    if (record.size() > 1 || !record[0].empty()) records.push_back(record);
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted)
          throw DataError(path + ":" + std::to_string(line) + ": stray quote");
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw DataError(path + ": unterminated quoted field");
  if (!field.empty() || field_was_quoted || !record.empty()) end_record();
  if (records.empty()) throw DataError(path + ": empty file (header row required)");
  return records;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name,
                        const std::string& path) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DataError(path + ": missing column '" + name + "'");
}

std::string join_protected(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += "|";
    out += values[i];
  }
  return out;
}

}  // namespace

// ---- synthetic Gaussians ----

LabeledDataset gaussian_sample(const GaussianSpec& spec) {
  const std::size_t ncells = spec.space.num_cells();
  if (spec.cells.size() != ncells) throw ShapeError("gaussian_sample: cell list size mismatch");
  check_same_space(spec.joint.space, spec.space, "gaussian_sample");
  const std::size_t d = spec.dim();
  if (d == 0) throw ShapeError("gaussian_sample: zero-dimensional features");

  std::vector<std::vector<double>> chol(ncells);
  for (std::size_t c = 0; c < ncells; ++c) {
    if (spec.cells[c].mean.size() != d || spec.cells[c].cov.size() != d * d)
      throw ShapeError("gaussian_sample: ragged cell parameters");
    chol[c] = cholesky_spd(spec.cells[c].cov, d, "gaussian_sample");
  }

  LabeledDataset data;
  data.n = spec.n;
  data.dim = d;
  data.group_names = spec.space.groups;
  data.label_names = spec.space.disc_values;
  data.features.resize(spec.n * d);
  data.group.resize(spec.n);
  data.label.resize(spec.n);

  CounterRng rng(spec.seed, 0x6a55);
  std::vector<double> z(d);
  const std::size_t nv = spec.space.num_disc();
  for (std::size_t i = 0; i < spec.n; ++i) {
    double u = rng.next_double();
    std::size_t cell = ncells - 1;
    for (std::size_t c = 0; c < ncells; ++c) {
      if (u < spec.joint.probs[c]) {
        cell = c;
        break;
      }
      u -= spec.joint.probs[c];
    }
    data.group[i] = static_cast<int>(cell / nv);
    data.label[i] = static_cast<int>(cell % nv);
    for (std::size_t j = 0; j < d; ++j) z[j] = rng.next_normal();
    double* row = data.features.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) {
      double s = spec.cells[cell].mean[j];
      for (std::size_t k = 0; k <= j; ++k) s += chol[cell][j * d + k] * z[k];
      row[j] = s;
    }
  }
  return data;
}

namespace {
// Declared simulation geometry (2-d, covariance 0.5 I): classes split along
// axis 1 by +-kClassSep around the group centre; group 1 sits at
// (+kGroupShiftX, -kGroupShiftY). The joint-optimal boundary is slanted, the
// group-0-only boundary is vertical and loses the (1, 0) cell.
constexpr double kClassSep = 2.0;
constexpr double kGroupShiftX = 3.9;
constexpr double kGroupShiftY = 2.12;
constexpr double kVariance = 0.5;
}  // namespace

GaussianSpec default_simulation_spec(const GroupMarginal& joint, std::size_t n,
                                     std::uint64_t seed) {
  GaussianSpec spec;
  spec.space = GroupSpace({"0", "1"}, {"0", "1"});
  check_same_space(joint.space, spec.space, "default_simulation_spec");
  spec.joint = joint;
  spec.n = n;
  spec.seed = seed;
  for (int a = 0; a <= 1; ++a) {
    for (int y = 0; y <= 1; ++y) {
      GaussianCell cell;
      const double cx = a == 1 ? kGroupShiftX : 0.0;
      const double cy = a == 1 ? -kGroupShiftY : 0.0;
      cell.mean = {cx + (y == 1 ? kClassSep : -kClassSep), cy};
      cell.cov = {kVariance, 0.0, 0.0, kVariance};
      spec.cells.push_back(std::move(cell));
    }
  }
  return spec;
}

GroupMarginal simulation_joint_pstar() {
  return GroupMarginal(GroupSpace({"0", "1"}, {"0", "1"}), {0.25, 0.25, 0.25, 0.25});
}

GroupMarginal simulation_joint_ptilde(double p_minor) {
  if (!(p_minor > 0.0) || !(p_minor <= 0.25))
    throw ConfigError("simulation_joint_ptilde: p_minor must be in (0, 0.25]");
  const double p_major = 0.5 - p_minor;
  return GroupMarginal(GroupSpace({"0", "1"}, {"0", "1"}),
                       {p_major, p_major, p_minor, p_minor});
}

// ---- tabular CSV ----

namespace {

TabularLoad load_csv_impl(const std::string& path, const TabularSchema& schema,
                          const TabularEncoding* fitted) {
  if (schema.features.empty()) throw ConfigError("load_csv: schema has no feature columns");
  if (schema.protected_columns.empty()) throw ConfigError("load_csv: schema has no protected columns");
  {
    std::set<std::string> names;
    for (const auto& f : schema.features) names.insert(f.name);
    for (const auto& p : schema.protected_columns) names.insert(p);
    names.insert(schema.label_column);
    if (names.size() != schema.features.size() + schema.protected_columns.size() + 1)
      throw ConfigError("load_csv: schema columns must be disjoint");
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_csv: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto records = parse_csv(ss.str(), path);
  const auto& header = records.front();

  std::vector<std::size_t> feature_cols;
  for (const auto& f : schema.features) feature_cols.push_back(find_column(header, f.name, path));
  std::vector<std::size_t> protected_cols;
  for (const auto& p : schema.protected_columns) protected_cols.push_back(find_column(header, p, path));
  const std::size_t label_col = find_column(header, schema.label_column, path);

  struct Row {
    std::vector<std::string> raw_features;
    std::string group;
    std::string label;
  };
  std::vector<Row> rows;
  std::size_t dropped = 0;

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size())
      throw DataError(path + ": row " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                      " fields, expected " + std::to_string(header.size()));
    Row row;
    bool missing = false;
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      const std::string& cell = rec[feature_cols[f]];
      if (cell.empty()) missing = true;
      row.raw_features.push_back(cell);
    }
    std::vector<std::string> pvals;
    for (std::size_t p : protected_cols) {
      if (rec[p].empty()) missing = true;
      pvals.push_back(rec[p]);
    }
    if (rec[label_col].empty()) missing = true;
    if (missing) {
      ++dropped;
      continue;
    }
    row.group = join_protected(pvals);
    row.label = rec[label_col];
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no usable data rows");

  TabularEncoding enc;
  if (fitted) {
    enc = *fitted;
  } else {
    std::set<std::string> groups, labels;
    std::vector<std::set<std::string>> levels(schema.features.size());
    for (const auto& row : rows) {
      groups.insert(row.group);
      labels.insert(row.label);
      for (std::size_t f = 0; f < schema.features.size(); ++f) {
        if (schema.features[f].categorical) levels[f].insert(row.raw_features[f]);
      }
    }
    if (labels.size() != 2)
      throw DataError(path + ": label column has " + std::to_string(labels.size()) +
                      " distinct values, expected 2");
    if (!labels.count(schema.positive_label))
      throw DataError(path + ": positive label '" + schema.positive_label + "' not present");
    for (const auto& l : labels) {
      if (l != schema.positive_label) enc.label_names.push_back(l);
    }
    enc.label_names.push_back(schema.positive_label);
    enc.group_names.assign(groups.begin(), groups.end());
    enc.categorical_levels.resize(schema.features.size());
    for (std::size_t f = 0; f < schema.features.size(); ++f) {
      if (schema.features[f].categorical) {
        enc.categorical_levels[f].assign(levels[f].begin(), levels[f].end());
        for (const auto& lv : enc.categorical_levels[f]) {
          enc.feature_names.push_back(schema.features[f].name + "=" + lv);
          enc.standardizable.push_back(false);
        }
      } else {
        enc.feature_names.push_back(schema.features[f].name);
        enc.standardizable.push_back(true);
      }
    }
  }

  std::map<std::string, int> group_index, label_index;
  for (std::size_t i = 0; i < enc.group_names.size(); ++i) group_index[enc.group_names[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < enc.label_names.size(); ++i) label_index[enc.label_names[i]] = static_cast<int>(i);

  TabularLoad out;
  out.encoding = enc;
  out.dropped_rows = dropped;
  LabeledDataset& data = out.data;
  data.dim = enc.feature_names.size();
  data.group_names = enc.group_names;
  data.label_names = enc.label_names;

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Row& row = rows[r];
    auto git = group_index.find(row.group);
    if (git == group_index.end())
      throw DataError(path + ": row " + std::to_string(r + 1) + ": unknown protected value '" +
                      row.group + "'");
    auto lit = label_index.find(row.label);
    if (lit == label_index.end())
      throw DataError(path + ": row " + std::to_string(r + 1) + ": label '" + row.label +
                      "' outside the two known values");
    std::vector<double> feats;
    feats.reserve(data.dim);
    for (std::size_t f = 0; f < schema.features.size(); ++f) {
      if (schema.features[f].categorical) {
        const auto& lv = enc.categorical_levels[f];
        const auto pos = std::find(lv.begin(), lv.end(), row.raw_features[f]);
        if (pos == lv.end())
          throw DataError(path + ": row " + std::to_string(r + 1) + ": unseen level '" +
                          row.raw_features[f] + "' in column '" + schema.features[f].name + "'");
        for (std::size_t l = 0; l < lv.size(); ++l)
          feats.push_back(l == static_cast<std::size_t>(pos - lv.begin()) ? 1.0 : 0.0);
      } else {
        double v = 0.0;
        if (!parse_double(row.raw_features[f], v))
          throw DataError(path + ": row " + std::to_string(r + 1) + ": unparseable value '" +
                          row.raw_features[f] + "' in column '" + schema.features[f].name + "'");
        feats.push_back(v);
      }
    }
    data.features.insert(data.features.end(), feats.begin(), feats.end());
    data.group.push_back(git->second);
    data.label.push_back(lit->second);
    data.n++;
  }
  return out;
}

}  // namespace

TabularLoad load_csv(const std::string& path, const TabularSchema& schema) {
  return load_csv_impl(path, schema, nullptr);
}

TabularLoad load_csv(const std::string& path, const TabularSchema& schema,
                     const TabularEncoding& encoding) {
  return load_csv_impl(path, schema, &encoding);
}

Standardizer Standardizer::fit(const LabeledDataset& data, const std::vector<bool>& standardizable) {
  if (standardizable.size() != data.dim) throw ShapeError("Standardizer::fit: mask size mismatch");
  if (data.n == 0) throw DataError("Standardizer::fit: empty dataset");
  Standardizer s;
  s.mean.assign(data.dim, 0.0);
  s.scale.assign(data.dim, 1.0);
  for (std::size_t j = 0; j < data.dim; ++j) {
    if (!standardizable[j]) continue;
    double m = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) m += data.features[i * data.dim + j];
    m /= static_cast<double>(data.n);
    double var = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
      const double d = data.features[i * data.dim + j] - m;
      var += d * d;
    }
    var /= static_cast<double>(data.n);
    s.mean[j] = m;
    s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

void Standardizer::apply(LabeledDataset& data) const {
  if (mean.size() != data.dim) throw ShapeError("Standardizer::apply: dimension mismatch");
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.dim; ++j)
      data.features[i * data.dim + j] = (data.features[i * data.dim + j] - mean[j]) / scale[j];
  }
}

TrainTest split_train_test(const LabeledDataset& data, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0) || !(ratio < 1.0)) throw ConfigError("split_train_test: ratio outside (0, 1)");
  data.validate();
  const std::size_t ncells = data.group_names.size() * data.label_names.size();
  const std::size_t ny = data.label_names.size();
  std::vector<std::vector<std::size_t>> cells(ncells);
  for (std::size_t i = 0; i < data.n; ++i)
    cells[static_cast<std::size_t>(data.group[i]) * ny + static_cast<std::size_t>(data.label[i])]
        .push_back(i);

  const std::size_t n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(data.n)));
  std::vector<double> shares(ncells);
  for (std::size_t c = 0; c < ncells; ++c)
    shares[c] = static_cast<double>(cells[c].size()) / static_cast<double>(data.n);
  const std::vector<std::size_t> take = largest_remainder_counts(shares, n_train);

  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t c = 0; c < ncells; ++c) {
    auto& rows = cells[c];
    if (take[c] > rows.size())
      throw DataError("split_train_test: rounding asked for more rows than a cell holds");
    CounterRng rng(derive_seed(seed, {0x517, c}));
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.next_below(rows.size() - k));
      std::swap(rows[k], rows[j]);
    }
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + take[c]);
    test_rows.insert(test_rows.end(), rows.begin() + take[c], rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return TrainTest{data.select(train_rows), data.select(test_rows)};
}

LabeledDataset make_pstar_testset(const LabeledDataset& test, std::uint64_t seed) {
  test.validate();
  if (test.n == 0) throw DataError("make_pstar_testset: empty test set");
  const std::size_t na = test.group_names.size();
  const std::size_t ny = test.label_names.size();
  std::vector<std::size_t> n_ay(na * ny, 0), n_y(ny, 0);
  for (std::size_t i = 0; i < test.n; ++i) {
    n_ay[static_cast<std::size_t>(test.group[i]) * ny + static_cast<std::size_t>(test.label[i])]++;
    n_y[static_cast<std::size_t>(test.label[i])]++;
  }

  GroupSpace space(test.group_names, test.label_names);
  std::vector<double> target(na * ny, 0.0);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double p_y = static_cast<double>(n_y[y]) / static_cast<double>(test.n);
      if (p_y > 0.0 && n_ay[a * ny + y] == 0)
        throw DataError("make_pstar_testset: cell (group='" + test.group_names[a] + "', label='" +
                        test.label_names[y] + "') is empty");
      target[space.cell(a, y)] = p_y / static_cast<double>(na);
    }
  }

  // Largest size for which every requested cell fits without replacement.
  std::size_t n_out = 0;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t y = 0; y < ny; ++y) {
      const std::size_t c = space.cell(a, y);
      if (target[c] <= 0.0) continue;
      const auto cap = static_cast<std::size_t>(static_cast<double>(n_ay[a * ny + y]) / target[c]);
      n_out = n_out == 0 ? cap : std::min(n_out, cap);
    }
  }
  while (n_out > 0) {
    const std::vector<std::size_t> counts = largest_remainder_counts(target, n_out);
    bool ok = true;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] > n_ay[c]) ok = false;
    }
    if (ok) break;
    --n_out;
  }

  return reweight_to_marginal(test, GroupMarginal(space, target), n_out, seed).data;
}

// ---- dataset / matrix / polytope CSV ----

void save_dataset_csv(const LabeledDataset& data, const std::string& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw DataError("save_dataset_csv: cannot open " + path);
  for (std::size_t j = 0; j < data.dim; ++j) out << "x" << j << ",";
  out << "group,label\n";
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.dim; ++j) out << fmt_double(data.features[i * data.dim + j]) << ",";
    out << csv_escape(data.group_names[static_cast<std::size_t>(data.group[i])]) << ","
        << csv_escape(data.label_names[static_cast<std::size_t>(data.label[i])]) << "\n";
  }
  if (!out) throw DataError("save_dataset_csv: write failed on " + path);
}

LabeledDataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_dataset_csv: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto records = parse_csv(ss.str(), path);
  const auto& header = records.front();
  if (header.size() < 3 || header[header.size() - 2] != "group" || header.back() != "label")
    throw DataError(path + ": expected trailing 'group,label' columns");
  const std::size_t d = header.size() - 2;

  LabeledDataset data;
  data.dim = d;
  std::map<std::string, int> gidx, lidx;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size())
      throw DataError(path + ": row " + std::to_string(r) + " has wrong field count");
    for (std::size_t j = 0; j < d; ++j) {
      double v = 0.0;
      if (!parse_double(rec[j], v))
        throw DataError(path + ": row " + std::to_string(r) + ": unparseable feature '" + rec[j] + "'");
      data.features.push_back(v);
    }
    auto g = gidx.emplace(rec[d], static_cast<int>(gidx.size()));
    if (g.second) data.group_names.push_back(rec[d]);
    data.group.push_back(g.first->second);
    auto l = lidx.emplace(rec[d + 1], static_cast<int>(lidx.size()));
    if (l.second) data.label_names.push_back(rec[d + 1]);
    data.label.push_back(l.first->second);
    data.n++;
  }
  data.validate();
  return data;
}

void save_matrix_csv(const GroupSpace& space, std::span<const double> values,
                     const std::string& path) {
  if (values.size() != space.num_cells()) throw ShapeError("save_matrix_csv: wrong array size");
  std::ofstream out(path);
  if (!out) throw DataError("save_matrix_csv: cannot open " + path);
  out << "group";
  for (const auto& v : space.disc_values) out << "," << csv_escape(v);
  out << "\n";
  for (std::size_t a = 0; a < space.num_groups(); ++a) {
    out << csv_escape(space.groups[a]);
    for (std::size_t v = 0; v < space.num_disc(); ++v) out << "," << fmt_double(values[space.cell(a, v)]);
    out << "\n";
  }
  if (!out) throw DataError("save_matrix_csv: write failed on " + path);
}

std::pair<GroupSpace, std::vector<double>> load_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_matrix_csv: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto records = parse_csv(ss.str(), path);
  const auto& header = records.front();
  if (header.size() < 2 || header[0] != "group")
    throw DataError(path + ": expected 'group' then disc-value columns");
  std::vector<std::string> disc(header.begin() + 1, header.end());
  std::vector<std::string> groups;
  std::vector<double> values;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size())
      throw DataError(path + ": row " + std::to_string(r) + " has wrong field count");
    groups.push_back(rec[0]);
    for (std::size_t j = 1; j < rec.size(); ++j) {
      double v = 0.0;
      if (!parse_double(rec[j], v))
        throw DataError(path + ": row " + std::to_string(r) + ": unparseable value '" + rec[j] + "'");
      values.push_back(v);
    }
  }
  return {GroupSpace(groups, disc), std::move(values)};
}

RiskProfile load_profile_csv(const std::string& path) {
  auto [space, values] = load_matrix_csv(path);
  return RiskProfile(std::move(space), std::move(values));
}

GroupMarginal load_marginal_csv(const std::string& path) {
  auto [space, values] = load_matrix_csv(path);
  return GroupMarginal(std::move(space), std::move(values));
}

void save_polytope_csv(const RiskPolytope& poly, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("save_polytope_csv: cannot open " + path);
  out << "vertex";
  for (std::size_t a = 0; a < poly.space.num_groups(); ++a) {
    for (std::size_t v = 0; v < poly.space.num_disc(); ++v)
      out << "," << csv_escape(poly.space.groups[a] + "|" + poly.space.disc_values[v]);
  }
  out << "\n";
  for (std::size_t i = 0; i < poly.size(); ++i) {
    out << "v" << i;
    for (double e : poly.vertices[i].values) out << "," << fmt_double(e);
    out << "\n";
  }
  if (!out) throw DataError("save_polytope_csv: write failed on " + path);
}

RiskPolytope load_polytope_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_polytope_csv: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto records = parse_csv(ss.str(), path);
  const auto& header = records.front();
  if (header.size() < 2 || header[0] != "vertex")
    throw DataError(path + ": expected 'vertex' then cell columns");

  std::vector<std::string> groups, disc;
  for (std::size_t j = 1; j < header.size(); ++j) {
    const auto sep = header[j].rfind('|');
    if (sep == std::string::npos)
      throw DataError(path + ": cell column '" + header[j] + "' is not 'group|disc'");
    const std::string g = header[j].substr(0, sep);
    const std::string v = header[j].substr(sep + 1);
    if (groups.empty() || groups.back() != g) groups.push_back(g);
    if (groups.size() == 1) disc.push_back(v);
  }
  GroupSpace space(groups, disc);
  if (space.num_cells() != header.size() - 1)
    throw DataError(path + ": header does not enumerate cells group-major");
  for (std::size_t a = 0; a < space.num_groups(); ++a) {
    for (std::size_t v = 0; v < space.num_disc(); ++v) {
      if (header[1 + space.cell(a, v)] != space.groups[a] + "|" + space.disc_values[v])
        throw DataError(path + ": header does not enumerate cells group-major");
    }
  }

  std::vector<RiskProfile> vertices;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size())
      throw DataError(path + ": row " + std::to_string(r) + " has wrong field count");
    std::vector<double> values;
    for (std::size_t j = 1; j < rec.size(); ++j) {
      double v = 0.0;
      if (!parse_double(rec[j], v))
        throw DataError(path + ": row " + std::to_string(r) + ": unparseable value '" + rec[j] + "'");
      values.push_back(v);
    }
    vertices.emplace_back(space, std::move(values));
  }
  return RiskPolytope(space, std::move(vertices));
}

}  // namespace frm
