#include "distham/action.hpp"

#include "distham/calculus.hpp"

namespace distham {

Vector momentum_map(const CotangentLiftedAction& action, const PhasePoint& z) {
  Vector j(action.dim());
  for (int i = 0; i < action.dim(); ++i) j[i] = z.p.dot(action.generators[i](z.q));
  return j;
}

Vector lifted_generator(const SmoothMap& xi, const Vector& z) {
  const PhasePoint pt = from_phase_vector(z);
  if (xi.input_dim() != pt.q.size()) throw DimensionError("lifted_generator: chart mismatch");
  Vector out(z.size());
  out << xi(pt.q), -jacobian(xi, pt.q).transpose() * pt.p;
  return out;
}

}  // namespace distham
