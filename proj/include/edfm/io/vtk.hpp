#pragma once

#include "edfm/coupling/coupled.hpp"

#include <filesystem>
#include <span>
#include <string>

namespace edfm::io {

/// Legacy ASCII unstructured grid: hexahedra, point displacement, cell p_M and div u.
/// Empty spans omit the corresponding field.
void write_grid_vtk(const mesh::StructuredGrid& grid, const linalg::Vector& u, std::span<const double> p_matrix,
                    std::span<const double> div_u, const std::filesystem::path& path);

/// One polygon per fracture CV with p_F, status (0 stick, 1 slip, 2 open),
/// tangential and normal jump.
void write_fracture_vtk(const coupling::CoupledModel& model, const coupling::CoupledState& state, int fracture,
                        const std::filesystem::path& path);

/// Per-CV rows: fracture, cv, arc, status, slip, opening, t_n, t_tau, p_F (MPa, m).
void write_fracture_csv(const coupling::CoupledModel& model, const coupling::CoupledState& state,
                        const std::filesystem::path& path);

/// Grid VTK, one VTK per fracture and the fracture CSV, all named after `tag`
/// (for example "day_027") inside `dir`.
void write_snapshot(const coupling::CoupledModel& model, const coupling::CoupledState& state,
                    const std::filesystem::path& dir, const std::string& tag, bool vtk = true, bool csv = true);

}  // namespace edfm::io
