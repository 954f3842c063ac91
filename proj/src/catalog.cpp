#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "spdelab/bernstein.hpp"
#include "spdelab/symbols.hpp"

namespace spdelab {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

double parse_number(const std::string& text, const std::string& id) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (...) {
  }
  throw Error("symbol id '" + id + "': invalid number '" + text + "'");
}

double multinomial(int m, std::span<const int> alpha) {
  double v = std::tgamma(m + 1.0);
  for (int a : alpha) v /= std::tgamma(a + 1.0);
  return std::round(v);
}

bool same_index(std::span<const int> a, std::span<const int> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

Symbol symbol_from_id(const std::string& id, int d) {
  const auto parts = split(id, ':');
  if (parts.empty()) throw Error("symbol id must not be empty");
  const std::string& head = parts[0];

  if (head == "heat" && parts.size() == 1) return make_heat_symbol(d);

  if (head == "frac" && parts.size() == 2) return make_fractional_symbol(d, parse_number(parts[1], id));

  if (head.rfind("order", 0) == 0 && parts.size() <= 2) {
    const int order = static_cast<int>(parse_number(head.substr(5), id));
    if (order < 2 || order % 2 != 0) throw Error("symbol id '" + id + "': order must be even and >= 2");
    const int m = order / 2;
    const bool oscillating = parts.size() == 2;
    if (oscillating && parts[1] != "sin") throw Error("symbol id '" + id + "': unknown modifier '" + parts[1] + "'");
    auto coeffs = [m, oscillating](double t, std::span<const int> a, std::span<const int> b) -> Cplx {
      if (!same_index(a, b)) return {0.0, 0.0};
      const double scale = oscillating ? 1.0 + 0.5 * std::sin(t) : 1.0;
      return {scale * multinomial(m, a), 0.0};
    };
    return make_high_order_symbol(d, m, coeffs, oscillating ? 0.5 : 1.0, oscillating, id);
  }

  if (head == "nonlocal" && parts.size() == 3) {
    const double gamma = parse_number(parts[1], id);
    const std::string& kind = parts[2];
    SphericalDensity density;
    double nu = 1.0;
    bool time_dependent = false;
    if (kind == "const") {
      density = [](double, Point) { return 1.0; };
    } else if (kind == "even") {
      density = [](double, Point w) { return 1.0 + 0.5 * w[0] * w[0]; };
    } else if (kind == "tilt") {
      density = [](double, Point w) { return 1.0 + 0.5 * w[0]; };
      nu = 0.5;
    } else if (kind == "pulse") {
      density = [](double t, Point w) { return 1.0 + 0.5 * std::sin(t) * w[0] * w[0]; };
      nu = 0.5;
      time_dependent = true;
    } else {
      throw Error("symbol id '" + id + "': unknown spherical density '" + kind + "'");
    }
    return make_nonlocal_symbol(d, gamma, density, nu, time_dependent, id);
  }

  if (head == "subord" && parts.size() >= 2) {
    return subordinate_symbol(bernstein_from_id(id.substr(7)), d, id);
  }

  throw Error("unknown symbol id '" + id + "'");
}

}  // namespace spdelab
