#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "membership.hpp"
#include "sampling_space.hpp"

namespace sisbox {

/// Finite family of periodic sets E_j that should partition E_phi.
struct PeriodicPartition {
  std::vector<SupportMask> parts;

  /// Overlap and coverage defects, each as a grid measure.
  struct Defects {
    double overlap = 0;
    double coverage = 0;  // |(union E_j) symmetric-difference E_phi|
  };

  Defects defects(const SupportMask& support) const {
    Defects d;
    if (parts.empty()) {
      d.coverage = support.measure();
      return d;
    }
    SupportMask uni(support.resolution(), false);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i].resolution() != support.resolution()) throw GridMismatch("partition mask resolution differs from the space");
      for (std::size_t j = i + 1; j < parts.size(); ++j) d.overlap += (parts[i] & parts[j]).measure();
      uni = uni | parts[i];
    }
    d.coverage = (uni ^ support).measure();
    return d;
  }

  void validate(const SupportMask& support) const {
    const auto d = defects(support);
    const double tol = 1.0 / support.resolution();
    if (d.overlap > tol) throw PartitionError("partition sets overlap", d.overlap);
    if (d.coverage > tol) throw PartitionError("partition does not cover the spectral support", d.coverage);
  }
};

struct DeterminingSetReport {
  std::vector<std::string> order;
  std::vector<SupportMask> supports;  // E_{f_i}
  double symmetric_difference = 0;
  Verdict verdict = Verdict::fail;
  std::vector<SupportMask> blocks;          // B_i
  std::vector<PeriodicSpectrum> alphas;     // alpha_i = 1/Z_{f_i}(0,.) on B_i
  double expansion_error = 0;               // max |s^ - sum alpha_i f_i^|
  std::vector<Signal> functions;

  bool passed() const { return verdict == Verdict::pass; }
};

namespace detail {

inline void require_member(const SamplingSpace& sp, const Signal& f, double tol) {
  const double res = membership_residual(f, sp);
  if (res > tol) throw NotInSpace(f.name(), res);
}

}  // namespace detail

/// Union of the E_{f_i} must equal E_phi up to one grid cell; then s^ = sum alpha_i f_i^.
inline DeterminingSetReport check_determining_set(const SamplingSpace& sp, std::span<const Signal> funcs,
                                                  double member_tol = kMembershipTolerance) {
  const auto& s = sp.settings;
  DeterminingSetReport r;
  SupportMask uni(s.grid.N, false);
  for (const auto& f : funcs) {
    detail::require_member(sp, f, member_tol);
    r.order.push_back(f.name());
    r.functions.push_back(f);
    r.supports.push_back(support_mask(grammian(f, s.grid), s.eps));
    uni = uni | r.supports.back();
  }
  r.symmetric_difference = (uni ^ sp.mask).measure();
  r.verdict = verdict_of(r.symmetric_difference <= 1.0 / s.grid.N);
  if (!r.passed()) return r;

  SupportMask covered(s.grid.N, false);
  std::vector<Signal> parts;
  for (std::size_t i = 0; i < funcs.size(); ++i) {
    r.blocks.push_back(r.supports[i] - covered);
    covered = covered | r.blocks.back();
    r.alphas.push_back(detail::guarded_inverse(zak_fiber(funcs[i], s), r.blocks.back(), s.eps));
    parts.push_back(modulate(funcs[i], r.alphas.back()));
  }
  const Signal expansion = sum_signals(parts, s.grid.N);
  r.expansion_error = detail::max_spectrum_diff(expansion, sp.sampling_function, s.grid);
  return r;
}

/// Residual of f - sum beta_i f_i with beta_i = alpha_i Z_f(0,.) on B_i.
inline double span_sum_check(const SamplingSpace& sp, const DeterminingSetReport& report, const Signal& f,
                             double member_tol = kMembershipTolerance) {
  if (!report.passed()) throw PreconditionError("span check needs a passing determining-set report");
  detail::require_member(sp, f, member_tol);
  const auto& s = sp.settings;
  const auto zf = zak_fiber(f, s);
  std::vector<Signal> parts;
  for (std::size_t i = 0; i < report.functions.size(); ++i) {
    PeriodicSpectrum beta(s.grid.N);
    for (std::size_t u = 0; u < beta.size(); ++u) beta[u] = report.alphas[i][u] * zf[u];
    parts.push_back(modulate(report.functions[i], beta));
  }
  return spectral_distance(f, sum_signals(parts, s.grid.N), s.grid);
}

struct Component {
  SupportMask mask;
  std::optional<SamplingSpace> space;
  std::string rejection;
  double masked_sampling_error = 0;  // max |s_j^ - s^ chi_{E_j}|
};

/// phi_j^ = phi^ chi_{E_j}; degenerate parts are kept with a rejection note.
inline std::vector<Component> decompose(const SamplingSpace& sp, const PeriodicPartition& partition) {
  partition.validate(sp.mask);
  std::vector<Component> out;
  for (std::size_t j = 0; j < partition.parts.size(); ++j) {
    Component c;
    c.mask = partition.parts[j] & sp.mask;
    try {
      const Signal phi = modulate(sp.generator, detail::indicator(c.mask), sp.generator.name() + "_" + std::to_string(j));
      c.space = build_space(phi, sp.settings);
      const Signal masked = modulate(sp.sampling_function, detail::indicator(c.mask));
      c.masked_sampling_error = detail::max_spectrum_diff(c.space->sampling_function, masked, sp.grid());
    } catch (const Error& e) {
      c.space.reset();
      c.rejection = e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

struct DirectSumResiduals {
  double residual = 0;     // ||f - sum_j f_j||
  double max_cross = 0;    // max_{j != l} ||P_l f_j||
  std::vector<Signal> parts;
};

inline DirectSumResiduals verify_direct_sum(const SamplingSpace& sp, const std::vector<Component>& components, const Signal& f) {
  DirectSumResiduals r;
  std::vector<const SamplingSpace*> spaces;
  for (const auto& c : components)
    if (c.space) spaces.push_back(&*c.space);
  for (const auto* c : spaces) r.parts.push_back(project(f, *c));
  if (r.parts.empty()) {
    r.residual = spectral_norm(f, sp.grid());
    return r;
  }
  r.residual = spectral_distance(f, sum_signals(r.parts, sp.grid().N), sp.grid());
  for (std::size_t j = 0; j < spaces.size(); ++j)
    for (std::size_t l = 0; l < spaces.size(); ++l)
      if (j != l) r.max_cross = std::max(r.max_cross, spectral_norm(project(r.parts[j], *spaces[l]), sp.grid()));
  return r;
}

/**
 * Members g(x) = f(a x - b) of a rescaled space, sampled on (k + b)/a:
 * g(x) = sum_k g((k + b)/a) s(a x - b - k).
 */
class RescaledSpace {
 public:
  RescaledSpace(SamplingSpace base, double a, double b) : base_(std::move(base)), a_(a), b_(b) {
    if (!(a > 0)) throw PreconditionError("lattice scale a must be positive");
  }

  const SamplingSpace& base() const { return base_; }
  double scale() const { return a_; }
  double offset() const { return b_; }

  double sample_point(int k) const { return (k + b_) / a_; }

  /// The rescaled member x -> f(a x - b).
  std::function<cplx(double)> member(const Signal& f) const {
    return [f, a = a_, b = b_](double x) { return f.evaluate(a * x - b); };
  }

  TimeSamples sample(const std::function<cplx(double)>& g) const {
    auto out = TimeSamples::window(base_.settings.k_max);
    for (int k = out.first; k <= out.last(); ++k) out.ref(k) = g(sample_point(k));
    out.tail_energy = out.edge_energy();
    return out;
  }

  /// Kernel of the k-th sample: s(a x - b - k).
  cplx kernel(double x, int k) const { return base_.sampling_function.evaluate(a_ * x - b_ - k); }

  std::vector<cplx> reconstruct(const TimeSamples& samples, std::span<const double> xs) const {
    std::vector<double> mapped(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) mapped[i] = a_ * xs[i] - b_;
    return sisbox::reconstruct(base_, samples, mapped);
  }

 private:
  SamplingSpace base_;
  double a_;
  double b_;
};

inline RescaledSpace lattice_rescale(const SamplingSpace& sp, double a, double b) { return RescaledSpace(sp, a, b); }

}  // namespace sisbox
