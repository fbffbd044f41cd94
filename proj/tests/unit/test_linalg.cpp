#include "edfm/linalg/sparse.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace edfm::linalg;

TEST_CASE("identity solve returns the right-hand side")
{
  TripletList t(5, 5);
  for (int i = 0; i < 5; ++i) t.add(i, i, 1.0);
  const Vector b = Vector::LinSpaced(5, 1.0, 5.0);
  CHECK((solve(assemble(t), b) - b).norm() == 0.0);
}

TEST_CASE("2x2 SPD system by hand")
{
  TripletList t(2, 2);
  t.add(0, 0, 4.0);
  t.add(0, 1, 1.0);
  t.add(1, 0, 1.0);
  t.add(1, 1, 3.0);
  const Vector b = (Vector(2) << 1.0, 2.0).finished();
  // det 11: x = (3*1 - 1*2, 4*2 - 1*1) / 11
  for (auto kind : {SolverKind::direct, SolverKind::iterative}) {
    SolverOptions o;
    o.kind = kind;
    const Vector x = solve(assemble(t), b, o);
    CHECK(std::abs(x[0] - 1.0 / 11.0) < 1e-12);
    CHECK(std::abs(x[1] - 7.0 / 11.0) < 1e-12);
  }
}

TEST_CASE("random diagonally dominant 1000x1000 passes the residual check")
{
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> col(0, 999);
  const int n = 1000;
  TripletList t(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int k = 0; k < 8; ++k) {
      const int j = col(rng);
      if (j == i) continue;
      const double v = u(rng);
      t.add(i, j, v);
      off += std::abs(v);
    }
    t.add(i, i, off + 1.0);
  }
  const auto A = assemble(t);
  Vector b(n);
  for (int i = 0; i < n; ++i) b[i] = u(rng);
  for (auto kind : {SolverKind::direct, SolverKind::iterative}) {
    SolverOptions o;
    o.kind = kind;
    SolveReport rep;
    const Vector x = solve(A, b, o, &rep);
    CHECK((A * x - b).norm() <= 1e-10 * b.norm());
    CHECK(rep.residual_norm <= 1e-10 * rep.rhs_norm);
  }
}

TEST_CASE("singular matrix reports a row")
{
  TripletList t(3, 3);
  t.add(0, 0, 1.0);
  t.add(2, 2, 1.0);
  SolverOptions o;
  o.kind = SolverKind::direct;
  try {
    solve(assemble(t), Vector::Ones(3), o);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.row() == 1);
  }
}

TEST_CASE("assembly is independent of insertion order")
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> idx(0, 49);
  TripletList t(50, 50);
  for (int k = 0; k < 2000; ++k) t.add(idx(rng), idx(rng), u(rng));
  const auto A = assemble(t);
  for (int trial = 0; trial < 5; ++trial) {
    TripletList p = t;
    std::shuffle(p.entries().begin(), p.entries().end(), rng);
    const auto B = assemble(p);
    REQUIRE(A.nonZeros() == B.nonZeros());
    CHECK(std::equal(A.valuePtr(), A.valuePtr() + A.nonZeros(), B.valuePtr()));
    CHECK(std::equal(A.innerIndexPtr(), A.innerIndexPtr() + A.nonZeros(), B.innerIndexPtr()));
  }
  // sorted unique columns per row
  for (int r = 0; r < A.rows(); ++r)
    for (int k = A.outerIndexPtr()[r] + 1; k < A.outerIndexPtr()[r + 1]; ++k)
      CHECK(A.innerIndexPtr()[k - 1] < A.innerIndexPtr()[k]);
}
