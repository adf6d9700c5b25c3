#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirboot/closure.hpp"
#include "dirboot/positivity.hpp"

namespace dirboot {

// steps points from lo to hi inclusive; steps == 1 gives lo only.
struct Axis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t steps = 1;
  std::vector<double> values() const;
};

struct ScanOptions {
  std::size_t level = 2;  // Lambda: basis words up to this length
  bool impose_symmetry = false;
  double tol = kDefaultPsdTol;
  // Closure constraints and assigned-but-determined moments must agree to this.
  double closure_tol = 1e-8;
  std::size_t depth = 20;
  std::size_t coarse = 201;
  std::size_t threads = 1;
  // Search variables that are neither assigned nor scanned are profiled:
  // the point is feasible if some value inside the bracket is.
  std::map<std::string, std::pair<double, double>> brackets;
  std::pair<double, double> default_bracket{-1.0, 1.0};
  std::optional<std::vector<Word>> basis;
};

struct ScanConfig {
  std::vector<Axis> couplings;  // at most two
  std::vector<Axis> variables;  // one or two
  ParamValues fixed;            // couplings held constant
  ScanOptions options;
};

struct PointResult {
  bool feasible = false;
  bool closure_ok = true;
  double min_eigenvalue = 0.0;
  double violation = 0.0;
  PsdReport psd;
  std::map<CyclicWord, double> profiled;  // chosen values of profiled variables
};

// Closure plus moment-matrix check at one coupling point.
class PointEvaluator {
 public:
  PointEvaluator(const EnsembleSpec& spec, const ParamValues& couplings, const ScanOptions& options);

  const Closure& closure() const { return closure_; }
  // Keys may be any moment names the closure tracks.
  PointResult evaluate(const std::map<CyclicWord, double>& assignment) const;
  PointResult evaluate(const std::map<std::string, double>& assignment) const;
  // min eigenvalue / max(1, ||M||), minus the closure violation; larger is better.
  double score(const PointResult& r) const;

 private:
  PointResult evaluate_fixed(const std::map<CyclicWord, double>& assignment) const;

  ScanOptions options_;
  Closure closure_;
  std::vector<Word> basis_;
};

PointResult feasible_point(const EnsembleSpec& spec, const ParamValues& couplings,
                           const std::map<std::string, double>& assignment, const ScanOptions& options);

struct FeasibleInterval {
  ParamValues couplings;
  std::string coupling_name;  // scanned coupling, if any
  std::string variable;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t level = 0;
  bool empty = true;
};

FeasibleInterval feasible_interval(const EnsembleSpec& spec, const ParamValues& couplings, const std::string& variable,
                                   std::pair<double, double> bracket, const ScanOptions& options);
FeasibleInterval feasible_interval(const PointEvaluator& eval, const ParamValues& couplings,
                                   const std::string& variable, std::pair<double, double> bracket,
                                   const ScanOptions& options);

// One interval per point of the first coupling axis (or one if none).
std::vector<FeasibleInterval> interval_scan(const EnsembleSpec& spec, const ScanConfig& config,
                                            std::pair<double, double> bracket);

struct RegionPoint {
  std::optional<double> c1, c2;
  double v1 = 0.0;
  std::optional<double> v2;
  bool feasible = false;
  double min_eigenvalue = 0.0;
  bool closure_ok = true;
};

struct RegionMask {
  std::vector<Axis> coupling_axes;
  std::vector<Axis> variable_axes;
  std::vector<RegionPoint> points;  // c1 outermost, v2 innermost
  std::size_t closure_failures = 0;
};

RegionMask region_scan(const EnsembleSpec& spec, const ScanConfig& config);

// 9 significant digits; nan/inf spelled out.
std::string format_number(double x);

void export_intervals(const std::vector<FeasibleInterval>& intervals, const std::string& path);
void export_region(const RegionMask& mask, const std::string& path);
std::string intervals_csv(const std::vector<FeasibleInterval>& intervals);
std::string region_csv(const RegionMask& mask);

}  // namespace dirboot
