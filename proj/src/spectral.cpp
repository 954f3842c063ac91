#include "spdelab/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace spdelab {
namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is. Plans are
// made once per shape with FFTW_ESTIMATE so the chosen algorithm (and hence
// every output bit) does not depend on timing.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int d, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(n, d, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
    std::vector<Cplx> scratch(total);
    int dims[3] = {n, n, n};
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft(d, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error("fftw: planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void run(const SpaceTimeGrid& grid, std::vector<Cplx>& data, int sign) {
  fftw_plan plan = plan_cache().get(grid.n(), grid.dim(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace

std::vector<Cplx> synthesize(const SpaceTimeGrid& grid, std::vector<Cplx> coeffs) {
  if (coeffs.size() != grid.points()) throw Error("synthesize: coefficient count does not match grid");
  const double scale = 1.0 / grid.box_volume();
  for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] *= grid.alternating_sign(k) * scale;
  run(grid, coeffs, FFTW_BACKWARD);
  return coeffs;
}

std::vector<Cplx> analyze(const SpaceTimeGrid& grid, std::vector<Cplx> values) {
  if (values.size() != grid.points()) throw Error("analyze: value count does not match grid");
  run(grid, values, FFTW_FORWARD);
  const double scale = grid.cell_volume();
  for (std::size_t k = 0; k < values.size(); ++k) values[k] *= grid.alternating_sign(k) * scale;
  return values;
}

std::vector<Cplx> analyze(const SpaceTimeGrid& grid, std::span<const double> values) {
  return analyze(grid, std::vector<Cplx>(values.begin(), values.end()));
}

Cplx evaluate_series(const SpaceTimeGrid& grid, std::span<const Cplx> coeffs, Point x) {
  Cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] == Cplx{0.0, 0.0}) continue;
    const Point xi = grid.frequency(k);
    double phase = 0.0;
    for (std::size_t a = 0; a < xi.size(); ++a) phase += xi[a] * x[a];
    acc += coeffs[k] * std::polar(1.0, phase);
  }
  return acc / grid.box_volume();
}

}  // namespace spdelab
