#ifndef LWFR_SOLVER1D_HPP
#define LWFR_SOLVER1D_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "lwfr/basis.hpp"
#include "lwfr/equations.hpp"
#include "lwfr/flux_correction.hpp"
#include "lwfr/limiters.hpp"
#include "lwfr/lwfr_core.hpp"
#include "lwfr/mesh.hpp"
#include "lwfr/options.hpp"
#include "lwfr/subcell.hpp"

namespace lwfr {

/// LWFR solver on a 1-D mesh with optional subcell blending.
///
/// Storage carries one ghost element per side: element e of the mesh lives
/// at index e+1. Periodic ghosts are copies of the opposite element, other
/// ghosts are mirror images (ghost node j <-> interior node N-j).
template <int N, class Eq>
class Solver1D {
 public:
  using State = typename Eq::State;
  static constexpr int n = N + 1;

  Solver1D(Eq eq, Mesh1D mesh, Boundary<State> left, Boundary<State> right, SolverOptions opts = {})
      : eq_(eq), mesh_(std::move(mesh)), bl_(std::move(left)), br_(std::move(right)),
        opts_(opts), basis_(build_basis(N, opts.family)), op_(basis_) {
    check_degree(N);
    mesh_.validate();
    opts_.validate();
    check_periodic_pair(bl_, br_, "x");
    nel_ = mesh_.size();
    periodic_ = bl_.kind == BcKind::Periodic;
    dx_.resize(nel_ + 2);
    for (int e = 0; e < nel_; ++e) dx_[e + 1] = mesh_.dx(e);
    dx_[0] = periodic_ ? dx_[nel_] : dx_[1];
    dx_[nel_ + 1] = periodic_ ? dx_[1] : dx_[nel_];
    u_.assign((nel_ + 2) * n, State{});
    alpha_.assign(nel_ + 2, 0.0);
    taf_.resize(nel_ + 2);
    finner_.assign((nel_ + 2) * N, State{});
    trm_.assign(nel_ + 2, State{});
    trp_.assign(nel_ + 2, State{});
    face_.assign(nel_ + 1, State{});
    face_lambda_.assign(nel_ + 1, 1.0);
    flux_in_ = State{};
  }

  const Eq& equation() const { return eq_; }
  const Basis& basis() const { return basis_; }
  const Operators<N>& operators() const { return op_; }
  const Mesh1D& mesh() const { return mesh_; }
  const SolverOptions& options() const { return opts_; }
  SolverOptions& options() { return opts_; }
  int elements() const { return nel_; }
  double time() const { return t_; }
  const StepStats& stats() const { return stats_; }
  const std::vector<AlphaSample>& alpha_history() const { return alpha_hist_; }

  double node_x(int e, int j) const { return mesh_.edges[e] + op_.nodes[j] * dx_[e + 1]; }
  const State& node(int e, int j) const { return u_[(e + 1) * n + j]; }
  State& node(int e, int j) { return u_[(e + 1) * n + j]; }
  /// Blending coefficient of mesh element e from the last step.
  double alpha(int e) const { return alpha_[e + 1]; }
  const State& face_flux(int f) const { return face_[f]; }
  double face_lambda(int f) const { return face_lambda_[f]; }
  /// Integral of the boundary fluxes entering the domain since t = 0.
  const State& boundary_inflow() const { return flux_in_; }

  /// Collocation (or element-mean) initialisation from conserved states.
  void set_initial(const std::function<State(double x, int e)>& ic) {
    for (int e = 0; e < nel_; ++e) {
      if (opts_.cell_average_ic) {
        const auto [xq, wq] = gauss_legendre_01(12);
        State m{};
        for (std::size_t q = 0; q < xq.size(); ++q)
          axpy(m, wq[q], ic(mesh_.edges[e] + xq[q] * dx_[e + 1], e));
        for (int j = 0; j < n; ++j) node(e, j) = m;
      } else {
        for (int j = 0; j < n; ++j) node(e, j) = ic(node_x(e, j), e);
      }
      for (int j = 0; j < n; ++j)
        if (!all_finite(node(e, j))) throw NonFiniteState("initial condition is not finite");
    }
    t_ = 0.0;
    stats_ = {};
    alpha_hist_.clear();
    flux_in_ = State{};
    std::fill(alpha_.begin(), alpha_.end(), 0.0);
  }

  State element_mean(int e) const {
    State m{};
    for (int j = 0; j < n; ++j) axpy(m, op_.weights[j], node(e, j));
    return m;
  }

  /// Sum over elements of dx_e * mean_e.
  State totals() const {
    State s{};
    for (int e = 0; e < nel_; ++e) axpy(s, dx_[e + 1], element_mean(e));
    return s;
  }

  void fill_ghosts(double t) {
    State* g0 = &u_[0];
    State* gN = &u_[(nel_ + 1) * n];
    if (periodic_) {
      for (int j = 0; j < n; ++j) {
        g0[j] = node(nel_ - 1, j);
        gN[j] = node(0, j);
      }
      return;
    }
    const double xl = mesh_.left(), xr = mesh_.right();
    for (int j = 0; j < n; ++j) {
      const double x0 = xl - dx_[0] + op_.nodes[j] * dx_[0];
      g0[j] = ghost_value(eq_, bl_, node(0, N - j), 0, x0, 0.0, t);
      const double x1 = xr + op_.nodes[j] * dx_[nel_ + 1];
      gN[j] = ghost_value(eq_, br_, node(nel_ - 1, N - j), 0, x1, 0.0, t);
    }
  }

  /// Time step from element means.
  double compute_dt() {
    if (opts_.fixed_dt > 0.0) return opts_.fixed_dt;
    const double cfl = opts_.cfl > 0.0 ? opts_.cfl : default_cfl(N);
    double best = std::numeric_limits<double>::infinity();
    int lo = 1, hi = nel_;
    if (opts_.dt_include_ghosts) {
      fill_ghosts(t_);
      lo = 0;
      hi = nel_ + 1;
    }
    for (int E = lo; E <= hi; ++E) {
      State m{};
      for (int j = 0; j < n; ++j) axpy(m, op_.weights[j], u_[E * n + j]);
      if (!is_admissible(eq_, m))
        throw AdmissibilityError("compute_dt: inadmissible mean in element " + std::to_string(E - 1));
      const double s = eq_.max_speed(m);
      if (s > 0.0) best = std::min(best, dx_[E] / s);
    }
    const double dt = opts_.cfl_safety * cfl * best;
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw InvalidArgument("compute_dt: non-positive or non-finite time step");
    return dt;
  }

  /// One time step with the retry policy: on an admissibility failure the
  /// step is redone with half the time step, at most max_retries times.
  void step(double dt) {
    const std::vector<State> backup(u_.begin(), u_.end());
    const State flux_backup = flux_in_;
    for (int attempt = 0;; ++attempt) {
      try {
        try_step(dt);
        t_ += dt;
        ++stats_.steps;
        record_alpha();
        return;
      } catch (const std::runtime_error& err) {
        if (attempt >= opts_.max_retries) throw;
        ++stats_.retries;
        if (stats_.retry_log.size() < 100)
          stats_.retry_log.push_back("t=" + std::to_string(t_) + ": " + err.what());
        std::copy(backup.begin(), backup.end(), u_.begin());
        flux_in_ = flux_backup;
        dt *= 0.5;
      }
    }
  }

  /// Advance to time T exactly; on_step is called after every step.
  void advance_to(double T, const std::function<void(const Solver1D&)>& on_step = {}) {
    while (t_ < T) {
      double dt = compute_dt();
      if (t_ + dt >= T * (1.0 - 1e-14) || t_ + dt > T) dt = T - t_;
      if (!(dt > 0.0)) break;
      step(dt);
      if (on_step) on_step(*this);
    }
  }

  /// Nodal admissibility of every real node.
  bool all_admissible() const {
    for (int e = 0; e < nel_; ++e)
      for (int j = 0; j < n; ++j)
        if (!is_admissible(eq_, node(e, j))) return false;
    return true;
  }

  // Checkpointing ----------------------------------------------------------

  void save_checkpoint(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write checkpoint " + path);
    const char magic[8] = {'L', 'W', 'F', 'R', 'C', 'K', '1', 'D'};
    os.write(magic, 8);
    const std::int32_t hdr[3] = {N, Eq::nvar, nel_};
    os.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    os.write(reinterpret_cast<const char*>(&t_), sizeof t_);
    const std::int64_t steps = stats_.steps;
    os.write(reinterpret_cast<const char*>(&steps), sizeof steps);
    os.write(reinterpret_cast<const char*>(flux_in_.data()), sizeof(double) * Eq::nvar);
    os.write(reinterpret_cast<const char*>(&u_[n]), sizeof(State) * nel_ * n);
  }

  void load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read checkpoint " + path);
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, "LWFRCK1D", 8) != 0) throw ConfigError("not a 1-D checkpoint: " + path);
    std::int32_t hdr[3];
    is.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    if (hdr[0] != N || hdr[1] != Eq::nvar || hdr[2] != nel_)
      throw ConfigError("checkpoint layout does not match solver");
    std::int64_t steps;
    is.read(reinterpret_cast<char*>(&t_), sizeof t_);
    is.read(reinterpret_cast<char*>(&steps), sizeof steps);
    is.read(reinterpret_cast<char*>(flux_in_.data()), sizeof(double) * Eq::nvar);
    is.read(reinterpret_cast<char*>(&u_[n]), sizeof(State) * nel_ * n);
    if (!is) throw ConfigError("truncated checkpoint " + path);
    stats_ = {};
    stats_.steps = steps;
  }

  // Pieces of the step exposed for tests ----------------------------------

  /// Blending coefficients for all elements including ghosts.
  void compute_alpha() {
    if (!is_blending(opts_.limiter)) {
      std::fill(alpha_.begin(), alpha_.end(), 0.0);
      return;
    }
    for (int e = 0; e < nel_; ++e) {
      std::array<double, n> q;
      for (int j = 0; j < n; ++j) q[j] = eq_.indicator(node(e, j));
      alpha_[e + 1] = clip_alpha(smoothness_alpha_1d<N>(q, op_, opts_.indicator), opts_.indicator);
    }
    sync_ghost_alpha();
    if (opts_.alpha_smoothing) {
      std::vector<double> a(alpha_.begin() + 1, alpha_.end() - 1);
      std::vector<std::array<int, 4>> nb(nel_);
      for (int e = 0; e < nel_; ++e) {
        int l = e - 1, r = e + 1;
        if (periodic_) {
          l = (l + nel_) % nel_;
          r = r % nel_;
        } else {
          if (l < 0) l = -1;
          if (r >= nel_) r = -1;
        }
        nb[e] = {l, r, -1, -1};
      }
      a = smooth_alpha(a, nb);
      for (int e = 0; e < nel_; ++e) alpha_[e + 1] = std::min(a[e], opts_.indicator.alpha_max);
      sync_ghost_alpha();
    }
  }

  /// Override the blending coefficients of mesh elements (tests only);
  /// the next step uses them instead of the indicator.
  void force_alpha(const std::vector<double>& a) {
    forced_alpha_ = a;
  }

  /// Run one step without retries or the time advance (tests only).
  void raw_step(double dt) { try_step(dt); t_ += dt; }

 private:
  void sync_ghost_alpha() {
    if (periodic_) {
      alpha_[0] = alpha_[nel_];
      alpha_[nel_ + 1] = alpha_[1];
    } else {
      alpha_[0] = alpha_[1];
      alpha_[nel_ + 1] = alpha_[nel_];
    }
  }

  void record_alpha() {
    int active = 0;
    double mx = 0.0;
    for (int e = 1; e <= nel_; ++e) {
      if (alpha_[e] > 0.0) ++active;
      mx = std::max(mx, alpha_[e]);
    }
    alpha_hist_.push_back({t_, static_cast<double>(active) / nel_, mx});
  }

  // slope stencil spacing from node j of element E to its neighbours
  double h_left(int E, int j) const {
    if (j > 0) return (op_.nodes[j] - op_.nodes[j - 1]) * dx_[E];
    if (E == 0) return (op_.nodes[1] - op_.nodes[0]) * dx_[E];
    return op_.nodes[0] * dx_[E] + (1.0 - op_.nodes[N]) * dx_[E - 1];
  }
  double h_right(int E, int j) const {
    if (j < N) return (op_.nodes[j + 1] - op_.nodes[j]) * dx_[E];
    if (E == nel_ + 1) return (op_.nodes[N] - op_.nodes[N - 1]) * dx_[E];
    return (1.0 - op_.nodes[N]) * dx_[E] + op_.nodes[0] * dx_[E + 1];
  }

  void try_step(double dt) {
    const bool blend = is_blending(opts_.limiter);
    const bool mh = opts_.limiter == LimiterKind::BlendMH;
    fill_ghosts(t_);
    if (!forced_alpha_.empty()) {
      for (int e = 0; e < nel_; ++e) alpha_[e + 1] = forced_alpha_[e];
      sync_ghost_alpha();
    } else {
      compute_alpha();
    }

    // element pass: time-averaged fluxes and low-order inner fluxes
    for (int E = 0; E <= nel_ + 1; ++E) {
      const State* ue = &u_[E * n];
      auto& taf = taf_[E];
      element_time_averaged_flux<N>(eq_, op_, ue, dt, dx_[E], taf);
      bool ok = all_finite(taf.F_left) && all_finite(taf.F_right) && all_finite(taf.U_left) &&
                all_finite(taf.U_right);
      for (int j = 0; j < n && ok; ++j) ok = all_finite(taf.F[j]);
      if (!ok) {
        if (!blend) throw NonFiniteState("time-averaged flux is not finite in element " + std::to_string(E - 1));
        alpha_[E] = 1.0;
      }
      if (!blend) continue;
      State* fin = &finner_[E * N];
      if (mh) {
        const State& ul = E > 0 ? u_[(E - 1) * n + N] : ue[0];
        const State& ur = E <= nel_ ? u_[(E + 1) * n] : ue[N];
        const double beta = 2.0 - alpha_[E];
        mh_element_traces<N>(eq_, op_, ue, ul, ur, h_left(E, 0), h_right(E, N), dx_[E], dt, beta, mh_);
        for (int j = 0; j < N; ++j) fin[j] = rusanov_flux(eq_, mh_.plus[j], mh_.minus[j + 1]);
        trm_[E] = mh_.minus[0];
        trp_[E] = mh_.plus[N];
      } else {
        for (int j = 0; j < N; ++j) fin[j] = rusanov_flux(eq_, ue[j], ue[j + 1]);
        trm_[E] = ue[0];
        trp_[E] = ue[N];
      }
    }

    // face pass
    for (int f = 0; f <= nel_; ++f) {
      const int L = f, R = f + 1;
      const auto& tl = taf_[L];
      const auto& tr = taf_[R];
      const State& nl = u_[L * n + N];
      const State& nr = u_[R * n];
      State Flw{};
      bool lw_ok = alpha_[L] < 1.0 || alpha_[R] < 1.0;
      if (lw_ok) {
        const double sigma = interface_sigma(eq_, tl.u_right, tr.u_left, nl, nr);
        Flw = lw_interface_flux(tl.F_right, tr.F_left, tl.U_right, tr.U_left, sigma);
        lw_ok = all_finite(Flw);
      }
      if (!blend) {
        if (!lw_ok) throw NonFiniteState("interface flux is not finite at face " + std::to_string(f));
        face_[f] = Flw;
        face_lambda_[f] = 1.0;
        continue;
      }
      const State flow = rusanov_flux(eq_, trp_[L], trm_[R]);
      double af = 0.5 * (alpha_[L] + alpha_[R]);
      if (!lw_ok) {
        af = 1.0;
        Flw = flow;
      }
      FaceSide<State> sl, sr;
      sl.active = periodic_ || L >= 1;
      sl.u = nl;
      sl.f_inner = finner_[L * N + N - 1];
      sl.c = dt / (op_.weights[N] * dx_[L]);
      sr.active = periodic_ || R <= nel_;
      sr.u = nr;
      sr.f_inner = finner_[R * N];
      sr.c = dt / (op_.weights[0] * dx_[R]);
      const auto cf = correct_interface_flux(eq_, Flw, flow, af, sl, sr, opts_.flux_correction);
      face_[f] = cf.F;
      face_lambda_[f] = cf.lambda;
      if (cf.lambda < 1.0 - af) ++stats_.corrected_faces;
    }

    // second element pass: residuals and update
    std::array<State, n> RH, RL;
    for (int E = 1; E <= nel_; ++E) {
      State* ue = &u_[E * n];
      const double a = alpha_[E];
      const State& Fl = face_[E - 1];
      const State& Fr = face_[E];
      const bool need_high = a < 1.0 || opts_.mean_audit;
      const bool need_low = a > 0.0 || (opts_.mean_audit && blend);
      if (need_high) lw_element_residual<N>(op_, taf_[E].F, Fl, Fr, dx_[E], RH);
      if (need_low) {
        const State* fin = &finner_[E * N];
        for (int j = 0; j <= N; ++j) {
          const State& fr = j == N ? Fr : fin[j];
          const State& fl = j == 0 ? Fl : fin[j - 1];
          RL[j] = (1.0 / (op_.weights[j] * dx_[E])) * (fr - fl);
        }
      }
      if (opts_.mean_audit && blend && all_finite(RH[0])) {
        std::array<State, n> hi, lo;
        for (int j = 0; j < n; ++j) {
          hi[j] = ue[j];
          axpy(hi[j], -dt, RH[j]);
          lo[j] = ue[j];
          axpy(lo[j], -dt, RL[j]);
        }
        const double d = mean_update_mismatch(hi.data(), lo.data(), op_.weights, n);
        stats_.max_audit_mismatch = std::max(stats_.max_audit_mismatch, d);
        if (!(d <= opts_.audit_tol))
          throw InvariantBreach("mean audit failed at element " + std::to_string(E - 1));
      }
      for (int j = 0; j < n; ++j) {
        if (a < 1.0) axpy(ue[j], -dt * (1.0 - a), RH[j]);
        if (a > 0.0) axpy(ue[j], -dt * a, RL[j]);
        if (!all_finite(ue[j]))
          throw NonFiniteState("non-finite state in element " + std::to_string(E - 1));
      }
    }
    State inflow = face_[0] - face_[nel_];
    axpy(flux_in_, dt, inflow);

    post_process(t_ + dt);
  }

  void post_process(double t_new) {
    if (opts_.limiter == LimiterKind::TVB) {
      fill_ghosts(t_new);
      tvb_limit_1d<N>(eq_, op_, u_, nel_, tvb_dx(), opts_.tvb_M, opts_.tvb_characteristic);
    }
    if constexpr (Eq::nconstraints > 0) {
      if (opts_.scaling_limiter) {
        for (int e = 0; e < nel_; ++e) {
          std::array<State, n> v;
          for (int j = 0; j < n; ++j) v[j] = node(e, j);
          try {
            if (scaling_limit_element(eq_, v, op_.weights)) ++stats_.scaling_events;
          } catch (const AdmissibilityError& err) {
            throw AdmissibilityError(std::string(err.what()) + " in element " + std::to_string(e));
          }
          for (int j = 0; j < n; ++j) node(e, j) = v[j];
        }
        for (int e = 0; e < nel_; ++e)
          for (int j = 0; j < n; ++j)
            if (!is_admissible(eq_, node(e, j)))
              throw AdmissibilityError("inadmissible node after scaling in element " + std::to_string(e));
      }
    }
  }

  const std::vector<double>& tvb_dx() {
    tvb_dx_.assign(dx_.begin() + 1, dx_.end() - 1);
    return tvb_dx_;
  }

  Eq eq_;
  Mesh1D mesh_;
  Boundary<State> bl_, br_;
  SolverOptions opts_;
  Basis basis_;
  Operators<N> op_;
  int nel_ = 0;
  bool periodic_ = false;
  double t_ = 0.0;
  std::vector<double> dx_, tvb_dx_;
  std::vector<State> u_;
  std::vector<double> alpha_, forced_alpha_;
  std::vector<ElementTaf1D<N, Eq>> taf_;
  std::vector<State> finner_, trm_, trp_, face_;
  std::vector<double> face_lambda_;
  MhTraces<N, State> mh_;
  State flux_in_{};
  StepStats stats_;
  std::vector<AlphaSample> alpha_hist_;
};

}  // namespace lwfr

#endif
