#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace edfm::linalg {

/// Compressed-row storage with sorted, unique column indices per row.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Vector = Eigen::VectorXd;

struct Triplet
{
  int row;
  int col;
  double value;
};

/// Unsorted coordinate-format accumulator. Duplicates are summed on assembly.
class TripletList
{
 public:
  TripletList() = default;
  TripletList(int rows, int cols) : rows_(rows), cols_(cols) {}

  void reserve(std::size_t n) { entries_.reserve(n); }
  void add(int row, int col, double value) { entries_.push_back({row, col, value}); }
  void clear() { entries_.clear(); }

  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int cols() const { return cols_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] const std::vector<Triplet>& entries() const { return entries_; }
  std::vector<Triplet>& entries() { return entries_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Triplet> entries_;
};

// Triplets are sorted by (row, col, value) before duplicates are summed, so
// the resulting matrix is bitwise independent of insertion order.
SparseMatrix assemble(TripletList triplets);

class SolverError : public std::runtime_error
{
 public:
  SolverError(const std::string& what, int row) : std::runtime_error(what), row_(row) {}
  /// Offending row, or -1 when no single row can be blamed.
  [[nodiscard]] int row() const { return row_; }

 private:
  int row_;
};

enum class SolverKind
{
  automatic,
  direct,
  iterative
};

struct SolverOptions
{
  SolverKind kind = SolverKind::automatic;
  // automatic switches to the iterative path above this many unknowns
  int direct_limit = 250000;
  double tolerance = 1e-10;
  int max_iterations = 5000;
  int restart = 60;
  double ilut_drop = 1e-6;
  int ilut_fill = 20;
};

struct SolveReport
{
  std::string method;
  int iterations = 0;
  double residual_norm = 0.0;
  double rhs_norm = 0.0;
};

/// Solves A x = rhs and verifies ||A x - rhs|| <= tolerance * ||rhs||.
Vector solve(const SparseMatrix& A, const Vector& rhs, const SolverOptions& options = {},
             SolveReport* report = nullptr);

/// Matrix Market coordinate dump (general, real).
void write_matrix_market(const SparseMatrix& A, const std::filesystem::path& path);

SolverKind parse_solver_kind(const std::string& name);

}  // namespace edfm::linalg
