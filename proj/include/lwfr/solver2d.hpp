#ifndef LWFR_SOLVER2D_HPP
#define LWFR_SOLVER2D_HPP

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

/// Tensor product of two 1-D meshes.
struct Mesh2D {
  Mesh1D x, y;
  int nx() const { return x.size(); }
  int ny() const { return y.size(); }
};

template <class State>
struct Boundaries2D {
  Boundary<State> xl, xr, yb, yt;
};

/// 2-D MUSCL-Hancock subcell data of one element: limited reconstructions
/// evolved to the half step, at the four faces of each subcell.
template <int N, class State>
struct MhTraces2D {
  static constexpr int n = N + 1;
  std::array<State, n * n> xm, xp, ym, yp;
};

/// LWFR solver on a Cartesian mesh. Padded element (I, J) with I in
/// [0, nx+1], J in [0, ny+1]; mesh element (ex, ey) is (ex+1, ey+1).
template <int N, class Eq>
class Solver2D {
 public:
  using State = typename Eq::State;
  static constexpr int n = N + 1;
  static constexpr int nn = n * n;

  Solver2D(Eq eq, Mesh2D mesh, Boundaries2D<State> bc, SolverOptions opts = {})
      : eq_(eq), mesh_(std::move(mesh)), bc_(std::move(bc)), opts_(opts),
        basis_(build_basis(N, opts.family)), op_(basis_) {
    check_degree(N);
    mesh_.x.validate();
    mesh_.y.validate();
    opts_.validate();
    if (opts_.limiter == LimiterKind::TVB) throw ConfigError("the TVB limiter is only available in 1-D");
    check_periodic_pair(bc_.xl, bc_.xr, "x");
    check_periodic_pair(bc_.yb, bc_.yt, "y");
    nx_ = mesh_.nx();
    ny_ = mesh_.ny();
    px_ = bc_.xl.kind == BcKind::Periodic;
    py_ = bc_.yb.kind == BcKind::Periodic;
    W_ = nx_ + 2;
    H_ = ny_ + 2;
    dx_.resize(W_);
    dy_.resize(H_);
    x0_.resize(W_);
    y0_.resize(H_);
    for (int e = 0; e < nx_; ++e) {
      dx_[e + 1] = mesh_.x.dx(e);
      x0_[e + 1] = mesh_.x.edges[e];
    }
    for (int e = 0; e < ny_; ++e) {
      dy_[e + 1] = mesh_.y.dx(e);
      y0_[e + 1] = mesh_.y.edges[e];
    }
    dx_[0] = px_ ? dx_[nx_] : dx_[1];
    dx_[nx_ + 1] = px_ ? dx_[1] : dx_[nx_];
    dy_[0] = py_ ? dy_[ny_] : dy_[1];
    dy_[ny_ + 1] = py_ ? dy_[1] : dy_[ny_];
    x0_[0] = mesh_.x.left() - dx_[0];
    x0_[nx_ + 1] = mesh_.x.right();
    y0_[0] = mesh_.y.left() - dy_[0];
    y0_[ny_ + 1] = mesh_.y.right();
    const std::size_t ne = static_cast<std::size_t>(W_) * H_;
    u_.assign(ne * nn, State{});
    alpha_.assign(ne, 0.0);
    taf_.resize(ne);
    fx_.assign(ne * N * n, State{});
    gy_.assign(ne * N * n, State{});
    tr_.assign(ne * 4 * n, State{});
    facex_.assign(static_cast<std::size_t>(nx_ + 1) * ny_ * n, State{});
    facey_.assign(static_cast<std::size_t>(ny_ + 1) * nx_ * n, State{});
  }

  const Eq& equation() const { return eq_; }
  const Operators<N>& operators() const { return op_; }
  const Basis& basis() const { return basis_; }
  const Mesh2D& mesh() const { return mesh_; }
  SolverOptions& options() { return opts_; }
  const SolverOptions& options() const { return opts_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double time() const { return t_; }
  const StepStats& stats() const { return stats_; }
  const std::vector<AlphaSample>& alpha_history() const { return alpha_hist_; }
  const State& boundary_inflow() const { return flux_in_; }

  double node_x(int ex, int i) const { return x0_[ex + 1] + op_.nodes[i] * dx_[ex + 1]; }
  double node_y(int ey, int j) const { return y0_[ey + 1] + op_.nodes[j] * dy_[ey + 1]; }
  const State& node(int ex, int ey, int i, int j) const { return u_[eidx(ex + 1, ey + 1) * nn + i + n * j]; }
  State& node(int ex, int ey, int i, int j) { return u_[eidx(ex + 1, ey + 1) * nn + i + n * j]; }
  double alpha(int ex, int ey) const { return alpha_[eidx(ex + 1, ey + 1)]; }

  void set_initial(const std::function<State(double x, double y)>& ic) {
    const auto [xq, wq] = gauss_legendre_01(10);
    for (int ey = 0; ey < ny_; ++ey)
      for (int ex = 0; ex < nx_; ++ex) {
        if (opts_.cell_average_ic) {
          State m{};
          for (std::size_t a = 0; a < xq.size(); ++a)
            for (std::size_t b = 0; b < xq.size(); ++b)
              axpy(m, wq[a] * wq[b], ic(x0_[ex + 1] + xq[a] * dx_[ex + 1], y0_[ey + 1] + xq[b] * dy_[ey + 1]));
          for (int q = 0; q < nn; ++q) node(ex, ey, q % n, q / n) = m;
        } else {
          for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) node(ex, ey, i, j) = ic(node_x(ex, i), node_y(ey, j));
        }
        for (int q = 0; q < nn; ++q)
          if (!all_finite(node(ex, ey, q % n, q / n))) throw NonFiniteState("initial condition is not finite");
      }
    t_ = 0.0;
    stats_ = {};
    alpha_hist_.clear();
    flux_in_ = State{};
    std::fill(alpha_.begin(), alpha_.end(), 0.0);
  }

  State element_mean(int ex, int ey) const {
    State m{};
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) axpy(m, op_.weights[i] * op_.weights[j], node(ex, ey, i, j));
    return m;
  }

  State totals() const {
    State s{};
    for (int ey = 0; ey < ny_; ++ey)
      for (int ex = 0; ex < nx_; ++ex) axpy(s, dx_[ex + 1] * dy_[ey + 1], element_mean(ex, ey));
    return s;
  }

  bool all_admissible() const {
    for (int ey = 0; ey < ny_; ++ey)
      for (int ex = 0; ex < nx_; ++ex)
        for (int q = 0; q < nn; ++q)
          if (!is_admissible(eq_, node(ex, ey, q % n, q / n))) return false;
    return true;
  }

  void fill_ghosts(double t) {
    // x ghosts for real rows, then y ghosts for every column (fills corners)
    for (int J = 1; J <= ny_; ++J) {
      State* g0 = elem(0, J);
      State* g1 = elem(nx_ + 1, J);
      const State* a = elem(1, J);
      const State* b = elem(nx_, J);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          if (px_) {
            g0[i + n * j] = b[i + n * j];
            g1[i + n * j] = a[i + n * j];
          } else {
            const double y = y0_[J] + op_.nodes[j] * dy_[J];
            g0[i + n * j] = ghost_value(eq_, bc_.xl, a[N - i + n * j], 0, x0_[0] + op_.nodes[i] * dx_[0], y, t);
            g1[i + n * j] = ghost_value(eq_, bc_.xr, b[N - i + n * j], 0, x0_[nx_ + 1] + op_.nodes[i] * dx_[nx_ + 1], y, t);
          }
        }
    }
    for (int I = 0; I <= nx_ + 1; ++I) {
      State* g0 = elem(I, 0);
      State* g1 = elem(I, ny_ + 1);
      const State* a = elem(I, 1);
      const State* b = elem(I, ny_);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          if (py_) {
            g0[i + n * j] = b[i + n * j];
            g1[i + n * j] = a[i + n * j];
          } else {
            const double x = x0_[I] + op_.nodes[i] * dx_[I];
            g0[i + n * j] = ghost_value(eq_, bc_.yb, a[i + n * (N - j)], 1, x, y0_[0] + op_.nodes[j] * dy_[0], t);
            g1[i + n * j] = ghost_value(eq_, bc_.yt, b[i + n * (N - j)], 1, x, y0_[ny_ + 1] + op_.nodes[j] * dy_[ny_ + 1], t);
          }
        }
    }
  }

  double compute_dt() {
    if (opts_.fixed_dt > 0.0) return opts_.fixed_dt;
    const double cfl = opts_.cfl > 0.0 ? opts_.cfl : default_cfl(N);
    double worst = 0.0;
    int lo_x = 1, hi_x = nx_, lo_y = 1, hi_y = ny_;
    if (opts_.dt_include_ghosts) {
      fill_ghosts(t_);
      lo_x = lo_y = 0;
      hi_x = nx_ + 1;
      hi_y = ny_ + 1;
    }
    for (int J = lo_y; J <= hi_y; ++J)
      for (int I = lo_x; I <= hi_x; ++I) {
        const State* ue = elem(I, J);
        State m{};
        for (int q = 0; q < nn; ++q) axpy(m, op_.weights[q % n] * op_.weights[q / n], ue[q]);
        if (!is_admissible(eq_, m))
          throw AdmissibilityError("compute_dt: inadmissible mean in element (" + std::to_string(I - 1) +
                                   "," + std::to_string(J - 1) + ")");
        const double xc = x0_[I] + 0.5 * dx_[I], yc = y0_[J] + 0.5 * dy_[J];
        double s = eq_.speed_x(m, xc, yc) / dx_[I] + eq_.speed_y(m, xc, yc) / dy_[J];
        if constexpr (Eq::nconstraints == 0) {
          // velocity may vary in space: take the largest value at the element corners
          for (double x : {x0_[I], x0_[I] + dx_[I]})
            for (double y : {y0_[J], y0_[J] + dy_[J]})
              s = std::max(s, eq_.speed_x(m, x, y) / dx_[I] + eq_.speed_y(m, x, y) / dy_[J]);
        }
        worst = std::max(worst, s);
      }
    const double dt = opts_.cfl_safety * cfl / worst;
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("compute_dt: non-positive or non-finite time step");
    return dt;
  }

  void step(double dt) {
    const std::vector<State> backup(u_);
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
        u_ = backup;
        flux_in_ = flux_backup;
        dt *= 0.5;
      }
    }
  }

  void advance_to(double T, const std::function<void(const Solver2D&)>& on_step = {}) {
    while (t_ < T) {
      double dt = compute_dt();
      if (t_ + dt >= T * (1.0 - 1e-14) || t_ + dt > T) dt = T - t_;
      if (!(dt > 0.0)) break;
      step(dt);
      if (on_step) on_step(*this);
    }
  }

  void compute_alpha() {
    if (!is_blending(opts_.limiter)) {
      std::fill(alpha_.begin(), alpha_.end(), 0.0);
      return;
    }
    std::vector<double> a(static_cast<std::size_t>(nx_) * ny_);
    for (int ey = 0; ey < ny_; ++ey)
      for (int ex = 0; ex < nx_; ++ex) {
        const State* ue = elem(ex + 1, ey + 1);
        std::array<double, nn> q;
        for (int k = 0; k < nn; ++k) q[k] = eq_.indicator(ue[k]);
        a[ex + nx_ * ey] = clip_alpha(smoothness_alpha_2d<N>(q, op_, opts_.indicator), opts_.indicator);
      }
    if (opts_.alpha_smoothing) {
      std::vector<std::array<int, 4>> nb(a.size());
      for (int ey = 0; ey < ny_; ++ey)
        for (int ex = 0; ex < nx_; ++ex) {
          auto wrap = [](int k, int m, bool p) { return p ? (k + m) % m : (k < 0 || k >= m ? -1 : k); };
          const int l = wrap(ex - 1, nx_, px_), r = wrap(ex + 1, nx_, px_);
          const int b = wrap(ey - 1, ny_, py_), t = wrap(ey + 1, ny_, py_);
          nb[ex + nx_ * ey] = {l < 0 ? -1 : l + nx_ * ey, r < 0 ? -1 : r + nx_ * ey,
                               b < 0 ? -1 : ex + nx_ * b, t < 0 ? -1 : ex + nx_ * t};
        }
      a = smooth_alpha(a, nb);
      for (auto& v : a) v = std::min(v, opts_.indicator.alpha_max);
    }
    for (int ey = 0; ey < ny_; ++ey)
      for (int ex = 0; ex < nx_; ++ex) alpha_[eidx(ex + 1, ey + 1)] = a[ex + nx_ * ey];
    sync_ghost_alpha();
  }

  void force_alpha(const std::vector<double>& a) { forced_alpha_ = a; }

  /// Fraction of mesh elements with alpha > 0 inside [x0,x1]x[y0,y1].
  double alpha_fraction(double xa, double xb, double ya, double yb) const {
    long tot = 0, act = 0;
    for (int ey = 0; ey < ny_; ++ey)
      for (int ex = 0; ex < nx_; ++ex) {
        const double xc = x0_[ex + 1] + 0.5 * dx_[ex + 1], yc = y0_[ey + 1] + 0.5 * dy_[ey + 1];
        if (xc < xa || xc > xb || yc < ya || yc > yb) continue;
        ++tot;
        if (alpha(ex, ey) > 0.0) ++act;
      }
    return tot ? static_cast<double>(act) / tot : 0.0;
  }

  void save_checkpoint(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write checkpoint " + path);
    os.write("LWFRCK2D", 8);
    const std::int32_t hdr[4] = {N, Eq::nvar, nx_, ny_};
    os.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    os.write(reinterpret_cast<const char*>(&t_), sizeof t_);
    const std::int64_t steps = stats_.steps;
    os.write(reinterpret_cast<const char*>(&steps), sizeof steps);
    os.write(reinterpret_cast<const char*>(flux_in_.data()), sizeof(double) * Eq::nvar);
    os.write(reinterpret_cast<const char*>(u_.data()), sizeof(State) * u_.size());
  }

  void load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read checkpoint " + path);
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, "LWFRCK2D", 8) != 0) throw ConfigError("not a 2-D checkpoint: " + path);
    std::int32_t hdr[4];
    is.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    if (hdr[0] != N || hdr[1] != Eq::nvar || hdr[2] != nx_ || hdr[3] != ny_)
      throw ConfigError("checkpoint layout does not match solver");
    std::int64_t steps;
    is.read(reinterpret_cast<char*>(&t_), sizeof t_);
    is.read(reinterpret_cast<char*>(&steps), sizeof steps);
    is.read(reinterpret_cast<char*>(flux_in_.data()), sizeof(double) * Eq::nvar);
    is.read(reinterpret_cast<char*>(u_.data()), sizeof(State) * u_.size());
    if (!is) throw ConfigError("truncated checkpoint " + path);
    stats_ = {};
    stats_.steps = steps;
  }

  void raw_step(double dt) { try_step(dt); t_ += dt; }

 private:
  std::size_t eidx(int I, int J) const { return static_cast<std::size_t>(I) + static_cast<std::size_t>(W_) * J; }
  State* elem(int I, int J) { return &u_[eidx(I, J) * nn]; }
  const State* elem(int I, int J) const { return &u_[eidx(I, J) * nn]; }
  // traces: side 0 = x-, 1 = x+, 2 = y-, 3 = y+; index by transverse node
  State& trace(int I, int J, int side, int k) { return tr_[(eidx(I, J) * 4 + side) * n + k]; }
  // inner x flux at (i+1/2, j), inner y flux at (i, j+1/2)
  State& fx(int I, int J, int i, int j) { return fx_[(eidx(I, J) * n + j) * N + i]; }
  State& gy(int I, int J, int i, int j) { return gy_[(eidx(I, J) * n + i) * N + j]; }

  void sync_ghost_alpha() {
    for (int J = 1; J <= ny_; ++J) {
      alpha_[eidx(0, J)] = alpha_[eidx(px_ ? nx_ : 1, J)];
      alpha_[eidx(nx_ + 1, J)] = alpha_[eidx(px_ ? 1 : nx_, J)];
    }
    for (int I = 0; I <= nx_ + 1; ++I) {
      alpha_[eidx(I, 0)] = alpha_[eidx(I, py_ ? ny_ : 1)];
      alpha_[eidx(I, ny_ + 1)] = alpha_[eidx(I, py_ ? 1 : ny_)];
    }
  }

  void record_alpha() {
    long active = 0;
    double mx = 0.0;
    for (int ey = 0; ey < ny_; ++ey)
      for (int ex = 0; ex < nx_; ++ex) {
        const double a = alpha(ex, ey);
        if (a > 0.0) ++active;
        mx = std::max(mx, a);
      }
    alpha_hist_.push_back({t_, static_cast<double>(active) / (static_cast<double>(nx_) * ny_), mx});
  }

  bool is_ghost(int I, int J) const { return I == 0 || J == 0 || I == nx_ + 1 || J == ny_ + 1; }
  bool needed(int I, int J) const {
    const bool gx = I == 0 || I == nx_ + 1, gy = J == 0 || J == ny_ + 1;
    return !(gx && gy);
  }

  // neighbour node value and spacing along x (dir 0) or y (dir 1) of node (i,j)
  // in padded element (I,J); missing neighbours fall back to the node itself
  void neighbours(int I, int J, int i, int j, int dir, State& um, State& up, double& h1, double& h2) const {
    const State* ue = elem(I, J);
    const int k = dir == 0 ? i : j;
    const auto& d = dir == 0 ? dx_ : dy_;
    const int E = dir == 0 ? I : J;
    const int last = dir == 0 ? nx_ + 1 : ny_ + 1;
    auto at = [&](int II, int JJ, int ii, int jj) -> const State& { return elem(II, JJ)[ii + n * jj]; };
    if (k > 0) {
      um = dir == 0 ? ue[(i - 1) + n * j] : ue[i + n * (j - 1)];
      h1 = (op_.nodes[k] - op_.nodes[k - 1]) * d[E];
    } else if (E > 0) {
      um = dir == 0 ? at(I - 1, J, N, j) : at(I, J - 1, i, N);
      h1 = op_.nodes[0] * d[E] + (1.0 - op_.nodes[N]) * d[E - 1];
    } else {
      um = ue[i + n * j];
      h1 = (op_.nodes[1] - op_.nodes[0]) * d[E];
    }
    if (k < N) {
      up = dir == 0 ? ue[(i + 1) + n * j] : ue[i + n * (j + 1)];
      h2 = (op_.nodes[k + 1] - op_.nodes[k]) * d[E];
    } else if (E < last) {
      up = dir == 0 ? at(I + 1, J, 0, j) : at(I, J + 1, i, 0);
      h2 = (1.0 - op_.nodes[N]) * d[E] + op_.nodes[0] * d[E + 1];
    } else {
      up = ue[i + n * j];
      h2 = (op_.nodes[N] - op_.nodes[N - 1]) * d[E];
    }
  }

  void mh_element(int I, int J, double dt, double beta) {
    const State* ue = elem(I, J);
    const double dx = dx_[I], dy = dy_[J];
    std::array<double, n + 1> sf;  // subcell faces in reference coordinates
    sf[0] = 0.0;
    for (int k = 0; k < n; ++k) sf[k + 1] = sf[k] + op_.weights[k];
    sf[n] = 1.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int q = i + n * j;
        const State& u0 = ue[q];
        State um, up;
        double h1, h2;
        const double dlx = (sf[i] - op_.nodes[i]) * dx, drx = (sf[i + 1] - op_.nodes[i]) * dx;
        const double dly = (sf[j] - op_.nodes[j]) * dy, dry = (sf[j + 1] - op_.nodes[j]) * dy;
        neighbours(I, J, i, j, 0, um, up, h1, h2);
        State sx = slope_limit_admissible(eq_, u0, mh_slope(um, u0, up, h1, h2, beta), dlx, drx);
        neighbours(I, J, i, j, 1, um, up, h1, h2);
        State sy = slope_limit_admissible(eq_, u0, mh_slope(um, u0, up, h1, h2, beta), dly, dry);
        State xm = u0, xp = u0, ym = u0, yp = u0;
        axpy(xm, dlx, sx);
        axpy(xp, drx, sx);
        axpy(ym, dly, sy);
        axpy(yp, dry, sy);
        const double xc = x0_[I] + op_.nodes[i] * dx, yc = y0_[J] + op_.nodes[j] * dy;
        const double xa = x0_[I] + sf[i] * dx, xb = x0_[I] + sf[i + 1] * dx;
        const double ya = y0_[J] + sf[j] * dy, yb = y0_[J] + sf[j + 1] * dy;
        State ut = (-1.0 / (op_.weights[i] * dx)) * (eq_.flux_x(xp, xb, yc) - eq_.flux_x(xm, xa, yc));
        axpy(ut, -1.0 / (op_.weights[j] * dy), eq_.flux_y(yp, xc, yb) - eq_.flux_y(ym, xc, ya));
        axpy(xm, 0.5 * dt, ut);
        axpy(xp, 0.5 * dt, ut);
        axpy(ym, 0.5 * dt, ut);
        axpy(yp, 0.5 * dt, ut);
        mh_.xm[q] = xm;
        mh_.xp[q] = xp;
        mh_.ym[q] = ym;
        mh_.yp[q] = yp;
      }
  }

  double sigma_dir(int dir, const State& tl, const State& tr, const State& nl, const State& nr, double x,
                   double y) const {
    auto sp = [&](const State& s) { return dir == 0 ? eq_.speed_x(s, x, y) : eq_.speed_y(s, x, y); };
    if (is_admissible(eq_, tl) && is_admissible(eq_, tr)) return std::max(sp(tl), sp(tr));
    return std::max(sp(nl), sp(nr));
  }

  void try_step(double dt) {
    const bool blend = is_blending(opts_.limiter);
    const bool mh = opts_.limiter == LimiterKind::BlendMH;
    fill_ghosts(t_);
    if (!forced_alpha_.empty()) {
      for (int ey = 0; ey < ny_; ++ey)
        for (int ex = 0; ex < nx_; ++ex) alpha_[eidx(ex + 1, ey + 1)] = forced_alpha_[ex + nx_ * ey];
      sync_ghost_alpha();
    } else {
      compute_alpha();
    }

    std::array<double, n + 1> sf;
    sf[0] = 0.0;
    for (int k = 0; k < n; ++k) sf[k + 1] = sf[k] + op_.weights[k];
    sf[n] = 1.0;

    // element pass
    for (int J = 0; J <= ny_ + 1; ++J)
      for (int I = 0; I <= nx_ + 1; ++I) {
        if (!needed(I, J)) continue;
        const std::size_t E = eidx(I, J);
        const State* ue = elem(I, J);
        auto& taf = taf_[E];
        element_time_averaged_flux_2d<N>(eq_, op_, ue, dt, x0_[I], dx_[I], y0_[J], dy_[J], taf);
        bool ok = true;
        for (int q = 0; q < nn && ok; ++q) ok = all_finite(taf.F[q]) && all_finite(taf.G[q]);
        for (int f = 0; f < 4 && ok; ++f)
          for (int k = 0; k < n && ok; ++k) ok = all_finite(taf.Fface[f][k]) && all_finite(taf.Uface[f][k]);
        if (!ok) {
          if (!blend) throw NonFiniteState("time-averaged flux is not finite");
          alpha_[E] = 1.0;
        }
        if (!blend) continue;
        const double dx = dx_[I], dy = dy_[J];
        if (mh) {
          mh_element(I, J, dt, 2.0 - alpha_[E]);
          for (int j = 0; j < n; ++j) {
            const double yc = y0_[J] + op_.nodes[j] * dy;
            for (int i = 0; i < N; ++i)
              fx(I, J, i, j) = rusanov_flux_2d(eq_, 0, mh_.xp[i + n * j], mh_.xm[i + 1 + n * j], x0_[I] + sf[i + 1] * dx, yc);
            trace(I, J, 0, j) = mh_.xm[n * j];
            trace(I, J, 1, j) = mh_.xp[N + n * j];
          }
          for (int i = 0; i < n; ++i) {
            const double xc = x0_[I] + op_.nodes[i] * dx;
            for (int j = 0; j < N; ++j)
              gy(I, J, i, j) = rusanov_flux_2d(eq_, 1, mh_.yp[i + n * j], mh_.ym[i + n * (j + 1)], xc, y0_[J] + sf[j + 1] * dy);
            trace(I, J, 2, i) = mh_.ym[i];
            trace(I, J, 3, i) = mh_.yp[i + n * N];
          }
        } else {
          for (int j = 0; j < n; ++j) {
            const double yc = y0_[J] + op_.nodes[j] * dy;
            for (int i = 0; i < N; ++i)
              fx(I, J, i, j) = rusanov_flux_2d(eq_, 0, ue[i + n * j], ue[i + 1 + n * j], x0_[I] + sf[i + 1] * dx, yc);
            trace(I, J, 0, j) = ue[n * j];
            trace(I, J, 1, j) = ue[N + n * j];
          }
          for (int i = 0; i < n; ++i) {
            const double xc = x0_[I] + op_.nodes[i] * dx;
            for (int j = 0; j < N; ++j)
              gy(I, J, i, j) = rusanov_flux_2d(eq_, 1, ue[i + n * j], ue[i + n * (j + 1)], xc, y0_[J] + sf[j + 1] * dy);
            trace(I, J, 2, i) = ue[i];
            trace(I, J, 3, i) = ue[i + n * N];
          }
        }
      }

    const double kx = opts_.kx, ky = 1.0 - opts_.kx;
    // x faces
    for (int J = 1; J <= ny_; ++J)
      for (int f = 0; f <= nx_; ++f) {
        const int L = f, R = f + 1;
        const std::size_t EL = eidx(L, J), ER = eidx(R, J);
        const double xf = f < nx_ ? x0_[R] : x0_[L] + dx_[L];
        for (int j = 0; j < n; ++j) {
          const double y = y0_[J] + op_.nodes[j] * dy_[J];
          const State& nl = elem(L, J)[N + n * j];
          const State& nr = elem(R, J)[n * j];
          State& out = facex_[(static_cast<std::size_t>(J - 1) * (nx_ + 1) + f) * n + j];
          face_flux(0, taf_[EL], taf_[ER], 1, 0, j, nl, nr, xf, y, alpha_[EL], alpha_[ER], blend,
                    trace(L, J, 1, j), trace(R, J, 0, j), fx(L, J, N - 1, j), fx(R, J, 0, j),
                    px_ || L >= 1, px_ || R <= nx_, dt / (kx * op_.weights[N] * dx_[L]),
                    dt / (kx * op_.weights[0] * dx_[R]), out);
        }
      }
    // y faces
    for (int f = 0; f <= ny_; ++f)
      for (int I = 1; I <= nx_; ++I) {
        const int B = f, T = f + 1;
        const std::size_t EB = eidx(I, B), ET = eidx(I, T);
        const double yf = f < ny_ ? y0_[T] : y0_[B] + dy_[B];
        for (int i = 0; i < n; ++i) {
          const double x = x0_[I] + op_.nodes[i] * dx_[I];
          const State& nl = elem(I, B)[i + n * N];
          const State& nr = elem(I, T)[i];
          State& out = facey_[(static_cast<std::size_t>(f) * nx_ + (I - 1)) * n + i];
          face_flux(1, taf_[EB], taf_[ET], 3, 2, i, nl, nr, x, yf, alpha_[EB], alpha_[ET], blend,
                    trace(I, B, 3, i), trace(I, T, 2, i), gy(I, B, i, N - 1), gy(I, T, i, 0),
                    py_ || B >= 1, py_ || T <= ny_, dt / (ky * op_.weights[N] * dy_[B]),
                    dt / (ky * op_.weights[0] * dy_[T]), out);
        }
      }

    // update
    std::array<std::array<State, n>, 4> faces;
    std::array<State, nn> RH, RL;
    for (int J = 1; J <= ny_; ++J)
      for (int I = 1; I <= nx_; ++I) {
        const std::size_t E = eidx(I, J);
        State* ue = elem(I, J);
        const double a = alpha_[E];
        const double dx = dx_[I], dy = dy_[J];
        for (int k = 0; k < n; ++k) {
          faces[0][k] = facex_[(static_cast<std::size_t>(J - 1) * (nx_ + 1) + (I - 1)) * n + k];
          faces[1][k] = facex_[(static_cast<std::size_t>(J - 1) * (nx_ + 1) + I) * n + k];
          faces[2][k] = facey_[(static_cast<std::size_t>(J - 1) * nx_ + (I - 1)) * n + k];
          faces[3][k] = facey_[(static_cast<std::size_t>(J) * nx_ + (I - 1)) * n + k];
        }
        const bool need_high = a < 1.0 || opts_.mean_audit;
        const bool need_low = a > 0.0 || (opts_.mean_audit && blend);
        if (need_high) lw_element_residual_2d<N>(op_, taf_[E].F, taf_[E].G, faces, dx, dy, RH);
        if (need_low) {
          for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
              const State& fr = i == N ? faces[1][j] : fx(I, J, i, j);
              const State& fl = i == 0 ? faces[0][j] : fx(I, J, i - 1, j);
              const State& gt = j == N ? faces[3][i] : gy(I, J, i, j);
              const State& gb = j == 0 ? faces[2][i] : gy(I, J, i, j - 1);
              State r = (1.0 / (op_.weights[i] * dx)) * (fr - fl);
              axpy(r, 1.0 / (op_.weights[j] * dy), gt - gb);
              RL[i + n * j] = r;
            }
        }
        if (opts_.mean_audit && blend && all_finite(RH[0])) {
          std::array<State, nn> hi, lo;
          std::array<double, nn> w2;
          for (int q = 0; q < nn; ++q) {
            hi[q] = ue[q];
            axpy(hi[q], -dt, RH[q]);
            lo[q] = ue[q];
            axpy(lo[q], -dt, RL[q]);
            w2[q] = op_.weights[q % n] * op_.weights[q / n];
          }
          const double d = mean_update_mismatch(hi.data(), lo.data(), w2, nn);
          stats_.max_audit_mismatch = std::max(stats_.max_audit_mismatch, d);
          if (!(d <= opts_.audit_tol)) throw InvariantBreach("mean audit failed");
        }
        for (int q = 0; q < nn; ++q) {
          if (a < 1.0) axpy(ue[q], -dt * (1.0 - a), RH[q]);
          if (a > 0.0) axpy(ue[q], -dt * a, RL[q]);
          if (!all_finite(ue[q])) throw NonFiniteState("non-finite state after update");
        }
      }

    // boundary inflow ledger
    State inflow{};
    for (int J = 1; J <= ny_; ++J)
      for (int j = 0; j < n; ++j) {
        const double w = op_.weights[j] * dy_[J];
        axpy(inflow, w, facex_[(static_cast<std::size_t>(J - 1) * (nx_ + 1)) * n + j]);
        axpy(inflow, -w, facex_[(static_cast<std::size_t>(J - 1) * (nx_ + 1) + nx_) * n + j]);
      }
    for (int I = 1; I <= nx_; ++I)
      for (int i = 0; i < n; ++i) {
        const double w = op_.weights[i] * dx_[I];
        axpy(inflow, w, facey_[(static_cast<std::size_t>(0) * nx_ + (I - 1)) * n + i]);
        axpy(inflow, -w, facey_[(static_cast<std::size_t>(ny_) * nx_ + (I - 1)) * n + i]);
      }
    axpy(flux_in_, dt, inflow);

    if constexpr (Eq::nconstraints > 0) {
      if (opts_.scaling_limiter) {
        std::array<double, nn> w2;
        for (int q = 0; q < nn; ++q) w2[q] = op_.weights[q % n] * op_.weights[q / n];
        for (int J = 1; J <= ny_; ++J)
          for (int I = 1; I <= nx_; ++I) {
            State* ue = elem(I, J);
            std::array<State, nn> v;
            std::copy(ue, ue + nn, v.begin());
            if (scaling_limit_element(eq_, v, w2)) ++stats_.scaling_events;
            for (int q = 0; q < nn; ++q) {
              if (!is_admissible(eq_, v[q])) throw AdmissibilityError("inadmissible node after scaling");
              ue[q] = v[q];
            }
          }
      }
    }
  }

  // F^LW, low-order flux, blend and correction at one face point
  void face_flux(int dir, const ElementTaf2D<N, Eq>& tl, const ElementTaf2D<N, Eq>& tr, int side_l,
                 int side_r, int k, const State& nl, const State& nr, double x, double y, double al,
                 double ar, bool blend, const State& trl, const State& trr, const State& finl,
                 const State& finr, bool act_l, bool act_r, double cl, double cr, State& out) {
    State Flw{};
    bool lw_ok = al < 1.0 || ar < 1.0;
    if (lw_ok) {
      const double sigma = sigma_dir(dir, tl.uface[side_l][k], tr.uface[side_r][k], nl, nr, x, y);
      Flw = lw_interface_flux(tl.Fface[side_l][k], tr.Fface[side_r][k], tl.Uface[side_l][k],
                              tr.Uface[side_r][k], sigma);
      lw_ok = all_finite(Flw);
    }
    if (!blend) {
      if (!lw_ok) throw NonFiniteState("interface flux is not finite");
      out = Flw;
      return;
    }
    const State flow = rusanov_flux_2d(eq_, dir, trl, trr, x, y);
    double af = 0.5 * (al + ar);
    if (!lw_ok) {
      af = 1.0;
      Flw = flow;
    }
    FaceSide<State> sl, sr;
    sl.active = act_l;
    sl.u = nl;
    sl.f_inner = finl;
    sl.c = cl;
    sr.active = act_r;
    sr.u = nr;
    sr.f_inner = finr;
    sr.c = cr;
    const auto cf = correct_interface_flux(eq_, Flw, flow, af, sl, sr, opts_.flux_correction);
    out = cf.F;
    if (cf.lambda < 1.0 - af) ++stats_.corrected_faces;
  }

  Eq eq_;
  Mesh2D mesh_;
  Boundaries2D<State> bc_;
  SolverOptions opts_;
  Basis basis_;
  Operators<N> op_;
  int nx_ = 0, ny_ = 0, W_ = 0, H_ = 0;
  bool px_ = false, py_ = false;
  double t_ = 0.0;
  std::vector<double> dx_, dy_, x0_, y0_;
  std::vector<State> u_;
  std::vector<double> alpha_, forced_alpha_;
  std::vector<ElementTaf2D<N, Eq>> taf_;
  std::vector<State> fx_, gy_, tr_, facex_, facey_;
  MhTraces2D<N, State> mh_;
  State flux_in_{};
  StepStats stats_;
  std::vector<AlphaSample> alpha_hist_;
};

}  // namespace lwfr

#endif
