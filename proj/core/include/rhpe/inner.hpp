#pragma once

#include "rhpe/hpe.hpp"
#include "rhpe/instance.hpp"
#include "rhpe/operators.hpp"

#include <string_view>

namespace rhpe {

enum class EngineKind { tseng, korpelevich };

const char* to_string(EngineKind kind) noexcept;
EngineKind parse_engine(std::string_view name);

/// Output of one inner step for the inclusion 0 ∈ F(x) + C(x) + μ(x − x0).
struct StepResult {
  HpeCertificate cert;
  /// C-part of the certificate: Tseng c ∈ C(y); Korpelevich q ∈ ∂g(x_next).
  Vector c;
  /// Point at which `c` is a member of C: y for Tseng, x_next for Korpelevich.
  Vector c_point;
  /// Engine's own next point. For Tseng this coincides with x_prev − λv; for
  /// Korpelevich it is the second prox point used to build the certificate.
  Vector x_next;
  /// lhs/rhs of the HPE inequality evaluated against σ.
  HpeCheck check;
};

/// Reusable buffers so the step loop does not allocate.
struct StepWorkspace {
  Vector p;
  Vector fp;
  Vector fy;
  Vector z;
  Vector scratch;
};

/// Tseng MFBS step with λ fixed:
///   y      = (I + λC_μ)⁻¹(x_prev − λF(P_Ω(x_prev)))
///   x_next = y − λ(F(y) − F(P_Ω(x_prev)))
///   c      = (x_prev − y)/λ − F(P_Ω(x_prev)) − μ(y − x0),   b = F(y) + c,  ε = 0.
/// Throws certificate_violation if the relative-error inequality fails for σ.
StepResult tseng_step(const LipschitzMap& f, const ResolventMap& c, const ConvexSet& omega,
                      double mu, const Vector& x0, const Vector& x_prev, double lambda,
                      double sigma);

/// Korpelevich extragradient step with prox of g_μ = g + (μ/2)‖· − x0‖²:
///   y      = (I + λ∂g_μ)⁻¹(x_prev − λF(x_prev))
///   x_next = (I + λ∂g_μ)⁻¹(x_prev − λF(y))
///   q      = (x_prev − λF(y) − x_next)/λ − μ(x_next − x0) ∈ ∂g(x_next)
///   ε      = g(y) − g(x_next) − ⟨q, y − x_next⟩,   b = F(y) + q ∈ F(y) + ∂_ε g(y).
/// Throws broken_convexity for ε < −1e-12 and certificate_violation if the
/// relative-error inequality fails for σ.
StepResult korpelevich_step(const LipschitzMap& f, const ResolventMap& g, double mu,
                            const Vector& x0, const Vector& x_prev, double lambda, double sigma);

// In-place variants used by the solvers. They report violations through the
// return value instead of throwing.
enum class StepStatus { ok, certificate_violation, broken_convexity };

StepStatus tseng_step_into(const LipschitzMap& f, const ResolventMap& c, const ConvexSet& omega,
                           double mu, const Vector& x0, const Vector& x_prev, double lambda,
                           double sigma, StepResult& out, StepWorkspace& ws);

StepStatus korpelevich_step_into(const LipschitzMap& f, const ResolventMap& g, double mu,
                                 const Vector& x0, const Vector& x_prev, double lambda,
                                 double sigma, StepResult& out, StepWorkspace& ws);

/// Implements step 1 of the regularized HPE method with the constant
/// stepsize λ = σ/L. If a certificate ever fails, the step is retried with λ
/// halved (up to 40 times); the reduced λ is kept and reported as λ_min.
class InnerEngine {
 public:
  static InnerEngine tseng(const ProblemInstance& problem, double sigma);
  static InnerEngine korpelevich(const ProblemInstance& problem, double sigma);
  static InnerEngine make(EngineKind kind, const ProblemInstance& problem, double sigma);

  EngineKind kind() const noexcept { return kind_; }
  double sigma() const noexcept { return sigma_; }
  /// Nominal stepsize σ/L.
  double nominal_lambda() const noexcept { return nominal_lambda_; }
  /// Current (smallest so far) stepsize.
  double lambda() const noexcept { return lambda_; }
  int halvings() const noexcept { return halvings_; }

  void step(const ProblemInstance& problem, double mu, const Vector& x0, const Vector& x_prev,
            StepResult& out, StepWorkspace& ws);

 private:
  InnerEngine(EngineKind kind, double sigma, double lambda);

  EngineKind kind_;
  double sigma_;
  double nominal_lambda_;
  double lambda_;
  int halvings_ = 0;
};

}  // namespace rhpe
