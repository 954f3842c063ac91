#include "spdelab/report.hpp"

#include "spdelab/common.hpp"

namespace spdelab {

Json CheckReport::to_json() const {
  Json out;
  out["name"] = name;
  out["passed"] = passed;
  out["values"] = values;
  out["notes"] = notes;
  return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("least_squares_slope: need >= 2 paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw Error("least_squares_slope: degenerate abscissae");
  return sxy / sxx;
}

}  // namespace spdelab
