#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Per-object worst-case execution time as a function of the number of
// threads bundled on one core, c(eta). Bundling threads of the same
// executable object shares cache state, so c grows sub-linearly: the model
// requires c to be nondecreasing and discrete-concave. Two representations:
//   - LinearGrowth: c(eta) = c1 * (1 + factor * (eta - 1)), the growth-factor
//     upper bound evaluated with equality.
//   - Table: measured values for eta = 1..k.
namespace dagot {

using ObjectId = int;

struct WcetoFn {
  enum class Model { linear, table };

  Model model = Model::linear;
  double c1 = 0.0;      // linear: single-thread cost, > 0
  double factor = 1.0;  // linear: growth factor, > 0 (values > 1 allowed but
                        // mark the object non-collapsible)
  std::vector<double> values;  // table: values[k] = c(k+1), strictly increasing

  static WcetoFn linear(double c1, double factor) {
    if (!(c1 > 0.0)) throw std::invalid_argument("wceto: c1 must be positive");
    if (!(factor > 0.0)) throw std::invalid_argument("wceto: factor must be positive");
    WcetoFn fn;
    fn.model = Model::linear;
    fn.c1 = c1;
    fn.factor = factor;
    return fn;
  }

  static WcetoFn table(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("wceto: empty table");
    for (size_t i = 0; i < v.size(); ++i) {
      if (v[i] < 0.0) throw std::invalid_argument("wceto: negative table entry");
      if (i > 0 && !(v[i] > v[i - 1]))
        throw std::invalid_argument("wceto: table not strictly increasing");
    }
    WcetoFn fn;
    fn.model = Model::table;
    fn.values = std::move(v);
    return fn;
  }
};

inline double eval(const WcetoFn& fn, int eta) {
  if (eta < 1) throw std::invalid_argument("wceto: eta must be >= 1");
  if (fn.model == WcetoFn::Model::linear)
    return fn.c1 * (1.0 + fn.factor * (eta - 1));
  if (static_cast<size_t>(eta) > fn.values.size())
    throw std::out_of_range("wceto: table has no entry for eta=" + std::to_string(eta));
  return fn.values[static_cast<size_t>(eta) - 1];
}

// Largest eta the function can be evaluated at (tables are finite).
inline int max_eta(const WcetoFn& fn) {
  if (fn.model == WcetoFn::Model::linear) return std::numeric_limits<int>::max();
  return static_cast<int>(fn.values.size());
}

// True iff the value list is strictly increasing with non-increasing
// increments: c(eta+1) - c(eta) >= c(eta+2) - c(eta+1).
inline bool check_concave(const std::vector<double>& values) {
  for (size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) return false;
  for (size_t i = 2; i < values.size(); ++i)
    if (values[i] - values[i - 1] > values[i - 1] - values[i - 2]) return false;
  return true;
}

// Minimal growth factor F such that values[eta] <= values[1]*(1 + F*(eta-1))
// for every tabulated eta, i.e. the max over eta >= 2 of
// (values[eta] - values[1]) / ((eta - 1) * values[1]). May exceed 1 for
// measurements without cache benefit; such objects are never collapsed.
inline double fit_growth_factor(const std::vector<double>& values) {
  if (values.size() < 2) throw std::invalid_argument("wceto: need >= 2 values to fit");
  if (!(values[0] > 0.0)) throw std::invalid_argument("wceto: c(1) must be positive");
  double best = 0.0;
  for (size_t i = 1; i < values.size(); ++i) {
    double f = (values[i] - values[0]) / (static_cast<double>(i) * values[0]);
    best = std::max(best, f);
  }
  return best;
}

// Objects whose cost grows faster than linear-in-eta at factor 1 gain
// nothing from bundling; they are excluded from collapse candidacy.
inline bool collapsible(const WcetoFn& fn) {
  if (fn.model == WcetoFn::Model::linear) return fn.factor <= 1.0;
  if (fn.values.size() < 2) return false;  // nothing to merge into
  // A fitted factor <= 1 alone does not make bundling safe: without concavity
  // the subadditivity c(a+b) <= c(a) + c(b) that collapse relies on can fail
  // (e.g. {10, 15, 29}: fit = 0.95 yet c(3) = 29 > c(1) + c(2) = 25).
  return check_concave(fn.values) && fit_growth_factor(fn.values) <= 1.0;
}

// Growth-factor fixture: CSV with header `name,growth_factor,c1`, one row
// per measured benchmark.
struct GrowthFactorRow {
  std::string name;
  double growth_factor;
  double c1;
};

inline std::vector<GrowthFactorRow> load_growth_factor_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open growth factor csv: " + path);
  std::vector<GrowthFactorRow> rows;
  std::string line;
  if (!std::getline(in, line) || line.rfind("name,growth_factor,c1", 0) != 0)
    throw std::runtime_error("growth factor csv: bad header in " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    GrowthFactorRow row;
    std::string field;
    if (!std::getline(ss, row.name, ',')) continue;
    if (!std::getline(ss, field, ',')) throw std::runtime_error("growth factor csv: bad row: " + line);
    row.growth_factor = std::stod(field);
    if (!std::getline(ss, field, ',')) throw std::runtime_error("growth factor csv: bad row: " + line);
    row.c1 = std::stod(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dagot
