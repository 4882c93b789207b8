#include "affrec/recovery.hpp"

#include <algorithm>
#include <cmath>

namespace affrec {

const char* to_string(RecoveryDegeneracy d) {
  switch (d) {
    case RecoveryDegeneracy::kNone: return "none";
    case RecoveryDegeneracy::kShearUnobservable: return "shear_unobservable";
    case RecoveryDegeneracy::kNoRealRoot: return "no_real_root";
    case RecoveryDegeneracy::kCoefficientsDegenerate: return "coefficients_degenerate";
  }
  return "unknown";
}

RecoveryCoefficients recovery_coefficients(const FundamentalMatrix& f,
                                           const SiftCorrespondence& corr) {
  const double u1 = corr.first.u, v1 = corr.first.v;
  const double u2 = corr.second.u, v2 = corr.second.v;

  RecoveryCoefficients c;
  c.b_c = u1 * f.f(1) + v1 * f.f(2) + f.f(3);
  c.c_c = u1 * f.f(4) + v1 * f.f(5) + f.f(6);
  c.d_c = -u2 * f.f(1) - v2 * f.f(4) - f.f(7);
  c.e_c = -u2 * f.f(2) - v2 * f.f(5) - f.f(8);

  // Coefficients of (q_u, q_v, w) after substituting the composed affine
  // model into B a1 + C a3 = D and B a2 + C a4 = E.
  const double c1 = std::cos(-corr.first.orientation);
  const double s1 = std::sin(-corr.first.orientation);
  const double c2 = std::cos(corr.second.orientation);
  const double s2 = std::sin(corr.second.orientation);
  c.g_c = c.b_c * c1 * c2 + c.c_c * c1 * s2;
  c.p_c = -c.b_c * s1 * s2 + c.c_c * s1 * c2;
  c.i_c = c.b_c * s1 * c2 + c.c_c * s1 * s2;
  c.j_c = -c.i_c;
  c.k_c = -c.b_c * c1 * s2 + c.c_c * c1 * c2;
  return c;
}

namespace {

struct ScaleShearSolution {
  double q_u, q_v, w;
};

// Residuals of the two linear constraints for a composed candidate; used to
// reject spurious roots from the near-degenerate branches.
bool satisfies_linear_constraints(const RecoveryCoefficients& c, const Eigen::Matrix2d& a) {
  const double r1 = c.b_c * a(0, 0) + c.c_c * a(1, 0) - c.d_c;
  const double tol1 =
      1e-8 * std::max(1.0, std::abs(c.b_c * a(0, 0)) + std::abs(c.c_c * a(1, 0)) +
                               std::abs(c.d_c));
  const double r2 = c.b_c * a(0, 1) + c.c_c * a(1, 1) - c.e_c;
  const double tol2 =
      1e-8 * std::max(1.0, std::abs(c.b_c * a(0, 1)) + std::abs(c.c_c * a(1, 1)) +
                               std::abs(c.e_c));
  return std::abs(r1) <= tol1 && std::abs(r2) <= tol2;
}

}  // namespace

RecoveryResult recover_affine(const FundamentalMatrix& f, const SiftCorrespondence& corr) {
  const RecoveryCoefficients c = recovery_coefficients(f, corr);
  const double q = corr.relative_scale();
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw std::invalid_argument("recover_affine: relative scale must be finite and positive");
  }
  const double eps = 1e-10 * std::max({std::abs(c.b_c), std::abs(c.c_c), 1.0});
  const double root_tol = 1e-12 * std::max(1.0, q);

  RecoveryResult out;
  std::vector<ScaleShearSolution> solutions;

  if (std::abs(c.i_c) > eps) {
    // Eliminate w from the first equation and substitute q_u = q / q_v into
    // the second; multiplied through by i_c the quadratic in q_v reads
    // (K I - G P) q_v^2 + (G D - E I) q_v + (J I - G^2) q = 0.
    const double qa = c.k_c * c.i_c - c.g_c * c.p_c;
    const double qb = c.g_c * c.d_c - c.e_c * c.i_c;
    const double qc = (c.j_c * c.i_c - c.g_c * c.g_c) * q;
    const QuadraticRoots roots = solve_quadratic(qa, qb, qc);
    if (roots.count == 0) {
      out.degeneracy = roots.identically_degenerate
                           ? RecoveryDegeneracy::kCoefficientsDegenerate
                           : RecoveryDegeneracy::kNoRealRoot;
      return out;
    }
    // Back-substituting w through the first equation alone divides by
    // i_c = s1*(B c2 + C s2) and loses accuracy for small s1 even though the
    // configuration is not degenerate. The rotation-combined form divides by
    // B c2 + C s2 only and yields the same w algebraically.
    const double c1 = std::cos(-corr.first.orientation);
    const double s1 = std::sin(-corr.first.orientation);
    const double c2 = std::cos(corr.second.orientation);
    const double s2 = std::sin(corr.second.orientation);
    const double x_c = c.b_c * c2 + c.c_c * s2;
    const double y_c = c.c_c * c2 - c.b_c * s2;
    for (int i = 0; i < roots.count; ++i) {
      const double q_v = roots.roots[static_cast<std::size_t>(i)];
      if (std::abs(q_v) <= root_tol) continue;
      const double q_u = q / q_v;
      const double w = (s1 * c.d_c + c1 * c.e_c - y_c * q_v) / x_c;
      solutions.push_back({q_u, q_v, w});
    }
  } else if (std::abs(c.g_c) > eps) {
    // w dropped out of the first equation: G q_u + P q_v = D with
    // q_u q_v = q, then w from the second equation.
    const QuadraticRoots roots = solve_quadratic(c.p_c, -c.d_c, c.g_c * q);
    if (roots.count == 0) {
      out.degeneracy = RecoveryDegeneracy::kNoRealRoot;
      return out;
    }
    for (int i = 0; i < roots.count; ++i) {
      const double q_v = roots.roots[static_cast<std::size_t>(i)];
      if (std::abs(q_v) <= root_tol) continue;
      const double q_u = q / q_v;
      const double w = (c.e_c - c.j_c * q_u - c.k_c * q_v) / c.g_c;
      solutions.push_back({q_u, q_v, w});
    }
  } else if (std::abs(c.k_c) > eps) {
    const double q_v = c.e_c / c.k_c;
    if (std::abs(q_v) > root_tol) {
      solutions.push_back({q / q_v, q_v, 0.0});
      out.degeneracy = RecoveryDegeneracy::kShearUnobservable;
    }
  } else {
    out.degeneracy = RecoveryDegeneracy::kCoefficientsDegenerate;
    return out;
  }

  for (const ScaleShearSolution& s : solutions) {
    RecoveryCandidate cand;
    cand.components.alpha1 = corr.first.orientation;
    cand.components.alpha2 = corr.second.orientation;
    cand.components.q_u = s.q_u;
    cand.components.q_v = s.q_v;
    cand.components.w = s.w;
    cand.ac.p1 = corr.p1();
    cand.ac.p2 = corr.p2();
    cand.ac.a = compose_affine(cand.components);
    if (!cand.ac.a.allFinite()) continue;
    if (!satisfies_linear_constraints(c, cand.ac.a)) continue;
    // the scale-invariant epipolar consistency check rejects spurious roots
    // introduced by noise-level leading coefficients
    try {
      if (af_consistency_residual(f, cand.ac) >= 1e-8) continue;
    } catch (const NumericalError&) {
      continue;
    }
    out.candidates.push_back(std::move(cand));
  }

  std::stable_sort(out.candidates.begin(), out.candidates.end(),
                   [](const RecoveryCandidate& x, const RecoveryCandidate& y) {
                     return std::abs(std::log(std::abs(x.components.q_u / x.components.q_v))) <
                            std::abs(std::log(std::abs(y.components.q_u / y.components.q_v)));
                   });

  if (out.candidates.empty() && out.degeneracy == RecoveryDegeneracy::kNone) {
    out.degeneracy = RecoveryDegeneracy::kNoRealRoot;
  }
  return out;
}

RecoveryResult filter_candidates(const RecoveryResult& r, double max_scale, double max_shear) {
  if (!(max_scale > 1.0) || !(max_shear > 0.0)) {
    throw std::invalid_argument("filter_candidates: max_scale must be > 1 and max_shear > 0");
  }
  RecoveryResult out;
  out.degeneracy = r.degeneracy;
  for (const RecoveryCandidate& cand : r.candidates) {
    const double ratio = cand.components.q_u / cand.components.q_v;
    if (!(ratio >= 1.0 / max_scale && ratio <= max_scale)) continue;
    const double shear =
        std::abs(cand.components.w) / std::sqrt(std::abs(cand.components.q_u * cand.components.q_v));
    if (shear > max_shear) continue;
    out.candidates.push_back(cand);
  }
  return out;
}

}  // namespace affrec
