#include "edfm/mechanics/sda.hpp"

#include "edfm/errors.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace edfm::mechanics {

std::string_view status_name(FractureStatus s)
{
  switch (s) {
    case FractureStatus::stick: return "STICK";
    case FractureStatus::slip: return "SLIP";
    case FractureStatus::open: return "OPEN";
  }
  return "?";
}

double TractionVector::shear() const { return std::hypot(tau1, tau2); }

TractionVector frame_traction(const Vec3& t, const Vec3& n, const Vec3& tau1, const Vec3& tau2)
{
  return {t.dot(n), t.dot(tau1), t.dot(tau2)};
}

double slip_function(const MechProps& props, const Vec3& t, const Vec3& n, double q)
{
  const double tn = t.dot(n);
  return (t - tn * n).norm() + props.friction * tn - q;
}

namespace {

using Mat3 = Eigen::Matrix3d;
using Status = FractureStatus;

/// Element-constant operators of the local problem.
struct Setup
{
  int nf = 1;
  const MechProps* props = nullptr;
  Matrix6 D;
  std::array<Matrix36, 2> N;
  std::array<Matrix63, 2> G;
  std::array<std::array<Mat3, 2>, 2> K;  // d t_i / d jump_j = -K_ij
  std::array<Vec3, 2> n;
  std::array<Mat3, 2> P;  // tangential projector
  std::array<Vec3, 2> t_trial;  // traction with zero jumps
  std::array<double, 2> scale;  // |K_ii|, converts tractions to jump units
  std::array<Vec3, 2> stick_jump;
  std::array<Vec3, 2> slip_base;
  std::array<double, 2> q_prev{};
};

Setup make_setup(const MechProps& props, const LocalProblem& pb)
{
  Setup s;
  s.nf = pb.n_fractures;
  s.props = &props;
  s.D = props.stiffness();
  for (int i = 0; i < s.nf; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    s.n[ui] = pb.normal[ui];
    s.N[ui] = traction_operator(pb.normal[ui]);
    s.G[ui] = sym_dyad(pb.ramp[ui]);
    s.P[ui] = Mat3::Identity() - s.n[ui] * s.n[ui].transpose();
    s.t_trial[ui] = s.N[ui] * (pb.prestress + s.D * pb.strain) + (pb.p_fracture[ui] - props.biot * pb.p_matrix) * s.n[ui];
    const Vec3& u_prev = pb.prev[ui].jump;
    s.q_prev[ui] = pb.prev[ui].q;
    s.stick_jump[ui] = s.P[ui] * u_prev;
    s.slip_base[ui] = s.stick_jump[ui];
    if (pb.prev[ui].status == Status::slip) s.slip_base[ui] += s.n[ui] * s.n[ui].dot(u_prev);
  }
  for (int i = 0; i < s.nf; ++i)
    for (int j = 0; j < s.nf; ++j)
      s.K[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          s.N[static_cast<std::size_t>(i)] * s.D * s.G[static_cast<std::size_t>(j)];
  for (int i = 0; i < s.nf; ++i) s.scale[static_cast<std::size_t>(i)] = s.K[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)].norm();
  return s;
}

/// Unknown layout: jumps of all fractures, then one multiplier per slipping fracture.
struct Layout
{
  std::array<Status, 2> status{};
  std::array<int, 2> lambda_index{-1, -1};
  int size = 0;
};

Layout make_layout(const Setup& s, const std::array<Status, 2>& status)
{
  Layout l;
  l.status = status;
  l.size = 3 * s.nf;
  for (int i = 0; i < s.nf; ++i)
    if (status[static_cast<std::size_t>(i)] == Status::slip) l.lambda_index[static_cast<std::size_t>(i)] = l.size++;
  return l;
}

Vec3 jump_of(const Eigen::VectorXd& x, int i) { return x.segment<3>(3 * i); }

Vec3 traction_of(const Setup& s, const Eigen::VectorXd& x, int i)
{
  const auto ui = static_cast<std::size_t>(i);
  Vec3 t = s.t_trial[ui];
  for (int j = 0; j < s.nf; ++j) t -= s.K[ui][static_cast<std::size_t>(j)] * jump_of(x, j);
  return t;
}

struct SlipDirection
{
  Vec3 m;
  Mat3 dm_dt;
};

SlipDirection slip_direction(const Setup& s, int i, const Vec3& t)
{
  const auto ui = static_cast<std::size_t>(i);
  const Vec3 tt = s.P[ui] * t;
  const double mag = tt.norm();
  SlipDirection d;
  if (mag <= 0.0) {
    d.m.setZero();
    d.dm_dt.setZero();
    return d;
  }
  d.m = tt / mag;
  d.dm_dt = (s.P[ui] - d.m * d.m.transpose()) / mag;
  return d;
}

/// Residual (in jump units) and Jacobian of the local system for fixed statuses.
void evaluate(const Setup& s, const Layout& l, const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* J)
{
  const auto& props = *s.props;
  r.setZero(l.size);
  if (J) J->setZero(l.size, l.size);
  for (int i = 0; i < s.nf; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const int row = 3 * i;
    const Vec3 t = traction_of(s, x, i);
    const double ks = s.scale[ui];
    switch (l.status[ui]) {
      case Status::stick:
        r.segment<3>(row) = jump_of(x, i) - s.stick_jump[ui];
        if (J) J->block<3, 3>(row, row).setIdentity();
        break;
      case Status::open:
        r.segment<3>(row) = t / ks;
        if (J)
          for (int j = 0; j < s.nf; ++j) J->block<3, 3>(row, 3 * j) = -s.K[ui][static_cast<std::size_t>(j)] / ks;
        break;
      case Status::slip: {
        const int li = l.lambda_index[ui];
        const double dl = x[li];
        const auto dir = slip_direction(s, i, t);
        const Vec3& n = s.n[ui];
        r.segment<3>(row) = jump_of(x, i) - s.slip_base[ui] - dl * (dir.m + props.dilation * n);
        const double q = s.q_prev[ui] + props.hardening * dl;
        r[li] = ((s.P[ui] * t).norm() + props.friction * t.dot(n) - q) / ks;
        if (J) {
          for (int j = 0; j < s.nf; ++j) {
            const Mat3& Kij = s.K[ui][static_cast<std::size_t>(j)];
            Mat3 a = dl * dir.dm_dt * Kij;
            if (i == j) a += Mat3::Identity();
            J->block<3, 3>(row, 3 * j) = a;
            J->block<1, 3>(li, 3 * j) = -(dir.m + props.friction * n).transpose() * Kij / ks;
          }
          J->block<3, 1>(row, li) = -(dir.m + props.dilation * n);
          (*J)(li, li) = -props.hardening / ks;
        }
        break;
      }
    }
  }
}

/// Largest residual converted back to traction units.
double residual_norm(const Setup& s, const Layout& l, const Eigen::VectorXd& r)
{
  double worst = 0.0;
  for (int i = 0; i < s.nf; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    worst = std::max(worst, r.segment<3>(3 * i).cwiseAbs().maxCoeff() * s.scale[ui]);
    if (l.lambda_index[ui] >= 0) worst = std::max(worst, std::abs(r[l.lambda_index[ui]]) * s.scale[ui]);
  }
  return worst;
}

/// Newton correction; minimum-norm least squares when the local Jacobian is
/// rank deficient (e.g. two orthogonal fractures whose slips produce the same
/// strain mode).
Eigen::MatrixXd newton_solve(const Eigen::MatrixXd& J, const Eigen::MatrixXd& rhs, int cell, bool require_consistent = true)
{
  Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
  if (lu.isInvertible()) return lu.solve(rhs);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(J);
  const Eigen::MatrixXd x = cod.solve(rhs);
  if (require_consistent && (J * x - rhs).norm() > 1e-8 * std::max(rhs.norm(), 1e-300))
    throw ConvergenceError("singular local contact Jacobian in cell " + std::to_string(cell), rhs.norm());
  return x;
}

struct FixedSolve
{
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;
};

FixedSolve solve_fixed(const Setup& s, const Layout& l, const LocalOptions& opt, int cell)
{
  FixedSolve out;
  out.x.setZero(l.size);
  for (int i = 0; i < s.nf; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    out.x.segment<3>(3 * i) = l.status[ui] == Status::slip ? s.slip_base[ui] : s.stick_jump[ui];
  }
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  evaluate(s, l, out.x, r, &J);
  for (int it = 0;; ++it) {
    out.residual = residual_norm(s, l, r);
    out.iterations = it;
    if (out.residual <= opt.tolerance) return out;
    if (it == opt.max_iterations) break;
    const Eigen::VectorXd dx = newton_solve(J, r, cell);
    // backtracking on the scaled residual norm
    const double merit = r.norm();
    double step = 1.0;
    Eigen::VectorXd trial;
    Eigen::VectorXd r_trial;
    for (int ls = 0; ls < 12; ++ls, step *= 0.5) {
      trial = out.x - step * dx;
      evaluate(s, l, trial, r_trial, nullptr);
      if (r_trial.norm() < (1.0 - 1e-4 * step) * merit) break;
    }
    out.x = trial;
    evaluate(s, l, out.x, r, &J);
  }
  std::ostringstream msg;
  msg << "local return mapping did not converge in cell " << cell << " after " << opt.max_iterations
      << " iterations (residual " << out.residual << " Pa)";
  throw ConvergenceError(msg.str(), out.residual);
}

Eigen::MatrixXd sensitivities(const Setup& s, const Layout& l, const Eigen::VectorXd& x, int cell)
{
  const auto& props = *s.props;
  const int np = 7 + s.nf;
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  evaluate(s, l, x, r, &J);
  Eigen::MatrixXd dr = Eigen::MatrixXd::Zero(l.size, np);
  for (int i = 0; i < s.nf; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (l.status[ui] == Status::stick) continue;
    // d t_i / d params
    Eigen::Matrix<double, 3, Eigen::Dynamic> dt = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, np);
    dt.leftCols<6>() = s.N[ui] * s.D;
    dt.col(6) = -props.biot * s.n[ui];
    dt.col(7 + i) = s.n[ui];
    const double ks = s.scale[ui];
    if (l.status[ui] == Status::open) {
      dr.middleRows<3>(3 * i) = dt / ks;
    } else {
      const int li = l.lambda_index[ui];
      const Vec3 t = traction_of(s, x, i);
      const auto dir = slip_direction(s, i, t);
      dr.middleRows<3>(3 * i) = -x[li] * dir.dm_dt * dt;
      dr.row(li) = (dir.m + props.friction * s.n[ui]).transpose() * dt / ks;
    }
  }
  // in the rank-deficient case only the combined jump effect is determined;
  // the minimum-norm split is used for the tangent
  const Eigen::MatrixXd dx = -newton_solve(J, dr, cell, false);
  return dx.topRows(3 * s.nf);
}

std::array<Status, 2> trial_status(const MechProps& props, const Setup& s, const LocalProblem& pb,
                                   const LocalOptions& opt)
{
  std::array<Status, 2> status{Status::stick, Status::stick};
  const Layout l = make_layout(s, status);
  Eigen::VectorXd x(l.size);
  for (int i = 0; i < s.nf; ++i) x.segment<3>(3 * i) = s.stick_jump[static_cast<std::size_t>(i)];
  for (int i = 0; i < s.nf; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Vec3 t = traction_of(s, x, i);
    if (t.dot(s.n[ui]) > 0.0)
      status[ui] = Status::open;
    else if (slip_function(props, t, s.n[ui], pb.prev[ui].q) > opt.tolerance)
      status[ui] = Status::slip;
  }
  return status;
}

/// Largest violation of the sign conditions of the statuses, in traction units
/// (zero for an admissible state).
double violation(const MechProps& props, const Setup& s, const LocalProblem& pb, const Layout& l,
                 const FixedSolve& sol)
{
  double v = 0.0;
  for (int i = 0; i < s.nf; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Vec3 t = traction_of(s, sol.x, i);
    const double tn = t.dot(s.n[ui]);
    switch (l.status[ui]) {
      case Status::stick:
        v = std::max({v, tn, slip_function(props, t, s.n[ui], pb.prev[ui].q)});
        break;
      case Status::slip:
        v = std::max({v, tn, -sol.x[l.lambda_index[ui]] * s.scale[ui]});
        break;
      case Status::open:
        v = std::max(v, -s.n[ui].dot(jump_of(sol.x, i)) * s.scale[ui]);
        break;
    }
  }
  return v;
}

struct Candidate
{
  Layout layout;
  FixedSolve sol;
  double violation = std::numeric_limits<double>::infinity();
};

std::optional<Candidate> try_state(const MechProps& props, const Setup& s, const LocalProblem& pb,
                                   const LocalOptions& opt, const std::array<Status, 2>& status)
{
  if (s.nf > 1 && (status[0] == Status::open || status[1] == Status::open)) return std::nullopt;
  Candidate c;
  c.layout = make_layout(s, status);
  try {
    c.sol = solve_fixed(s, c.layout, opt, pb.cell);
  } catch (const ConvergenceError&) {
    return std::nullopt;
  }
  c.violation = violation(props, s, pb, c.layout, c.sol);
  return c;
}

/// Picks the contact state: the elastic-trial prediction first, then the
/// remaining candidates in a fixed order. When no candidate satisfies its sign
/// conditions exactly (possible when the averaged ramp gradient is not parallel
/// to the normal, which makes the element coupling non-symmetric) the least
/// violating converged candidate is returned with relaxed = true.
std::optional<Candidate> select_state(const MechProps& props, const Setup& s, const LocalProblem& pb,
                                      const LocalOptions& opt, const std::array<Status, 2>& trial, bool& relaxed)
{
  std::vector<std::array<Status, 2>> candidates{trial};
  if (s.nf == 1) {
    for (Status st : {Status::slip, Status::open, Status::stick})
      if (st != trial[0]) candidates.push_back({st, Status::stick});
  } else {
    std::array<Status, 2> refined = trial;
    for (auto& st : refined)
      if (st == Status::open) st = Status::slip;
    candidates.push_back(refined);
    for (Status a : {Status::slip, Status::stick})
      for (Status b : {Status::slip, Status::stick}) candidates.push_back({a, b});
  }
  std::optional<Candidate> best;
  for (const auto& status : candidates) {
    auto c = try_state(props, s, pb, opt, status);
    if (!c) continue;
    if (c->violation <= opt.tolerance) {
      relaxed = false;
      return c;
    }
    if (!best || c->violation < best->violation) best = std::move(c);
  }
  relaxed = true;
  return best;
}

}  // namespace

LocalSolution local_return_mapping(const MechProps& props, const LocalProblem& pb, const LocalOptions& opt)
{
  if (pb.n_fractures < 1 || pb.n_fractures > kMaxFracturesPerElement)
    throw ConfigError("an element may contain one or two fractures, got " + std::to_string(pb.n_fractures));
  const Setup s = make_setup(props, pb);

  const std::array<Status, 2> trial = trial_status(props, s, pb, opt);
  bool relaxed = false;
  const auto chosen = select_state(props, s, pb, opt, trial, relaxed);
  if (!chosen || (s.nf > 1 && relaxed && (trial[0] == Status::open || trial[1] == Status::open))) {
    if (s.nf > 1 && (trial[0] == Status::open || trial[1] == Status::open))
      throw UnsupportedStateError("opening of a fracture that shares cell " + std::to_string(pb.cell) +
                                      " with another fracture is not supported",
                                  pb.cell);
    throw ConvergenceError("no contact state converged in cell " + std::to_string(pb.cell), 0.0);
  }
  const Layout& layout = chosen->layout;
  const FixedSolve& sol = chosen->sol;

  LocalSolution out;
  out.iterations = sol.iterations;
  out.relaxed = relaxed;
  out.residual = sol.residual;
  Voigt eps = pb.strain;
  for (int i = 0; i < s.nf; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    JumpState& st = out.state[ui];
    st.status = layout.status[ui];
    st.jump = jump_of(sol.x, i);
    st.traction = traction_of(s, sol.x, i);
    st.dlambda = layout.lambda_index[ui] >= 0 ? sol.x[layout.lambda_index[ui]] : 0.0;
    st.slip = pb.prev[ui].slip + st.dlambda;
    st.q = pb.prev[ui].q + props.hardening * st.dlambda;
    eps -= s.G[ui] * st.jump;
  }
  out.sigma_bar = pb.prestress + s.D * eps;
  out.sensitivity = sensitivities(s, layout, sol.x, pb.cell);
  return out;
}

}  // namespace edfm::mechanics
