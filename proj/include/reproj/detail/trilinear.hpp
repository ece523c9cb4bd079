/*
 * reproj - closed-loop pose and style recovery for voxel shapes.
 *
 * Copyright 2026 The reproj Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "Eigen/Core"

#include <array>
#include <cmath>

namespace reproj::detail {

// Sample coordinates closer than this to a lattice point are snapped onto
// it, so quarter-turns and integer shifts resample exactly.
inline constexpr double kLatticeSnap = 1e-9;

/**
 * Lower corner and fractional offsets of the trilinear cell holding a sample
 * point. Lattice points outside [0, q-1]^3 read as zero.
 */
struct TrilinearCell
{
    int x0 = 0, y0 = 0, z0 = 0;
    double fx = 0.0, fy = 0.0, fz = 0.0;
};

inline void locate_axis(double p, int& i0, double& f) noexcept
{
    const double fl = std::floor(p);
    i0 = static_cast<int>(fl);
    f = p - fl;
    if (f < kLatticeSnap) {
        f = 0.0;
    } else if (f > 1.0 - kLatticeSnap) {
        ++i0;
        f = 0.0;
    }
}

// Returns false when no lattice neighbour lies inside the grid.
inline bool locate(int q, const Eigen::Vector3d& pos, TrilinearCell& c) noexcept
{
    if (!(pos.x() > -1.0 && pos.y() > -1.0 && pos.z() > -1.0 && pos.x() < q && pos.y() < q && pos.z() < q)) {
        return false;
    }
    locate_axis(pos.x(), c.x0, c.fx);
    locate_axis(pos.y(), c.y0, c.fy);
    locate_axis(pos.z(), c.z0, c.fz);
    return c.x0 < q && c.y0 < q && c.z0 < q && c.x0 >= -1 && c.y0 >= -1 && c.z0 >= -1;
}

inline bool cell_interior(int q, const TrilinearCell& c) noexcept
{
    return c.x0 >= 0 && c.y0 >= 0 && c.z0 >= 0 && c.x0 + 1 < q && c.y0 + 1 < q && c.z0 + 1 < q;
}

// Corner values ordered x-fastest: c[dx + 2 dy + 4 dz].
inline std::array<double, 8> gather(const double* v, int q, const TrilinearCell& c) noexcept
{
    std::array<double, 8> out;
    const Eigen::Index sy = q, sz = static_cast<Eigen::Index>(q) * q;
    if (cell_interior(q, c)) {
        const Eigen::Index base = c.x0 + sy * c.y0 + sz * c.z0;
        out = {v[base],           v[base + 1],           v[base + sy],      v[base + sy + 1],
               v[base + sz],      v[base + sz + 1],      v[base + sz + sy], v[base + sz + sy + 1]};
        return out;
    }
    for (int k = 0; k < 8; ++k) {
        const int x = c.x0 + (k & 1), y = c.y0 + ((k >> 1) & 1), z = c.z0 + ((k >> 2) & 1);
        const bool inside = x >= 0 && y >= 0 && z >= 0 && x < q && y < q && z < q;
        out[static_cast<std::size_t>(k)] = inside ? v[x + sy * y + sz * z] : 0.0;
    }
    return out;
}

inline double interpolate(const std::array<double, 8>& k, const TrilinearCell& c) noexcept
{
    const double c00 = k[0] + c.fx * (k[1] - k[0]);
    const double c10 = k[2] + c.fx * (k[3] - k[2]);
    const double c01 = k[4] + c.fx * (k[5] - k[4]);
    const double c11 = k[6] + c.fx * (k[7] - k[6]);
    const double c0 = c00 + c.fy * (c10 - c00);
    const double c1 = c01 + c.fy * (c11 - c01);
    return c0 + c.fz * (c1 - c0);
}

// Spatial gradient of the interpolant inside the cell.
inline Eigen::Vector3d interpolate_gradient(const std::array<double, 8>& k, const TrilinearCell& c) noexcept
{
    const double gx0 = (k[1] - k[0]) + c.fy * ((k[3] - k[2]) - (k[1] - k[0]));
    const double gx1 = (k[5] - k[4]) + c.fy * ((k[7] - k[6]) - (k[5] - k[4]));
    const double gy0 = (k[2] - k[0]) + c.fx * ((k[3] - k[1]) - (k[2] - k[0]));
    const double gy1 = (k[6] - k[4]) + c.fx * ((k[7] - k[5]) - (k[6] - k[4]));
    const double a0 = k[0] + c.fx * (k[1] - k[0]);
    const double a1 = k[2] + c.fx * (k[3] - k[2]);
    const double b0 = k[4] + c.fx * (k[5] - k[4]);
    const double b1 = k[6] + c.fx * (k[7] - k[6]);
    return {gx0 + c.fz * (gx1 - gx0), gy0 + c.fz * (gy1 - gy0), (b0 + c.fy * (b1 - b0)) - (a0 + c.fy * (a1 - a0))};
}

// Adds g times each corner weight into out; the adjoint of gather+interpolate.
inline void scatter(double* out, int q, const TrilinearCell& c, double g) noexcept
{
    const double wx[2] = {1.0 - c.fx, c.fx};
    const double wy[2] = {1.0 - c.fy, c.fy};
    const double wz[2] = {1.0 - c.fz, c.fz};
    const Eigen::Index sy = q, sz = static_cast<Eigen::Index>(q) * q;
    const bool interior = cell_interior(q, c);
    for (int k = 0; k < 8; ++k) {
        const int dx = k & 1, dy = (k >> 1) & 1, dz = (k >> 2) & 1;
        const int x = c.x0 + dx, y = c.y0 + dy, z = c.z0 + dz;
        if (!interior && !(x >= 0 && y >= 0 && z >= 0 && x < q && y < q && z < q)) {
            continue;
        }
        out[x + sy * y + sz * z] += g * wx[dx] * wy[dy] * wz[dz];
    }
}

inline double trilinear_sample(const Eigen::VectorXd& values, int q, const Eigen::Vector3d& pos)
{
    TrilinearCell c;
    if (!locate(q, pos, c)) {
        return 0.0;
    }
    return interpolate(gather(values.data(), q, c), c);
}

} // namespace reproj::detail
