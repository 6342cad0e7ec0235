#include "slowobs/measures.hpp"

#include <ostream>

namespace slowobs {

void OccupationalMeasure::write_csv(std::ostream& os) const {
  const std::size_t du = atoms.empty() ? 0 : atoms.front().u.size();
  const std::size_t m = atoms.empty() ? 0 : atoms.front().y.size();
  os << "weight";
  for (std::size_t i = 1; i <= du; ++i) os << ",u" << i;
  for (std::size_t i = 1; i <= m; ++i) os << ",y" << i;
  os << '\n';
  for (const Atom& a : atoms) {
    os << format_double(a.weight);
    for (double v : a.u) os << ',' << format_double(v);
    for (double v : a.y) os << ',' << format_double(v);
    os << '\n';
  }
}

OccupationalMeasure occupational_from_policy(const ModelSpec& model,
                                             const PeriodicOrbit& orbit,
                                             const StatePolicy& policy) {
  if (orbit.nodes.empty())
    throw std::invalid_argument("occupational_from_policy: empty orbit");
  OccupationalMeasure mu;
  mu.level = orbit.level;
  const double w = 1.0 / static_cast<double>(orbit.nodes.size());
  mu.atoms.reserve(orbit.nodes.size());
  for (const Vec& y : orbit.nodes) {
    Vec u = policy(y, orbit.level);
    if (!model.control_in_box(u))
      throw std::invalid_argument("occupational_from_policy: control outside box");
    mu.atoms.push_back(Atom{w, std::move(u), y});
  }
  return mu;
}

MeanFunctionals mean_functionals(const ModelSpec& model,
                                 const OccupationalMeasure& mu) {
  MeanFunctionals out;
  out.h_bar.assign(static_cast<std::size_t>(model.k), 0.0);
  for (const Atom& a : mu.atoms) {
    const Fields fl = eval_fields(model, a.u, a.y);
    for (int i = 0; i < model.k; ++i)
      out.h_bar[static_cast<std::size_t>(i)] +=
          a.weight * fl.h[static_cast<std::size_t>(i)];
    out.r_bar += a.weight * fl.r;
  }
  return out;
}

}  // namespace slowobs
