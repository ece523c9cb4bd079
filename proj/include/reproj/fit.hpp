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

#include "reproj/loss.hpp"
#include "reproj/projection.hpp"
#include "reproj/rotation.hpp"
#include "reproj/shape.hpp"

#include "Eigen/Core"

#include <cstdint>
#include <vector>

namespace reproj {

struct FitConfig
{
    int restarts = 16;
    int iterations = 300;
    double step_size = 0.02;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 0;
    // Stop a restart once its loss is within this distance of the clamp floor.
    double loss_tolerance = 1e-3;
    // Worker threads for restarts; 0 picks the hardware concurrency. Results
    // do not depend on it.
    int threads = 0;

    // Throws std::invalid_argument if a field is out of range.
    void validate() const;
};

struct FitResult
{
    StyleVector s;
    PoseParams p;
    double final_loss = 0.0;
    int restart_index = 0;
    int iterations_run = 0;
    std::vector<double> loss_trace;   // of the selected restart, one entry per evaluated iterate
    std::vector<double> restart_losses; // best loss of every restart
};

struct FitStart
{
    StyleVector s;
    PoseParams p;
};

/**
 * Recovers style and pose from a single target silhouette by minimizing the
 * reprojection loss with Adam from several rotation initializations
 * (s = 0, t = 0, w uniform in the pi-ball, seeded by seed + restart). The
 * twist is wrapped back into the pi-ball after every step. Each restart
 * reports its lowest-loss iterate; the restart with the lowest loss wins,
 * ties going to the lower index.
 *
 * Throws std::invalid_argument on a size mismatch and std::runtime_error on a
 * non-finite loss.
 */
FitResult fit_pose_style(const Silhouette& m_gt, const StyleBasis& basis, const FitConfig& config);

// Single Adam run from a given start; restart_index is reported as 0.
FitResult fit_from(const Silhouette& m_gt, const StyleBasis& basis, const FitConfig& config, const FitStart& start);

/**
 * Target silhouette of a posed generated shape. With binarize the hard
 * projection is thresholded at 0.5 and each pixel flipped with probability
 * noise; otherwise the soft projection is returned and noise must be 0.
 */
Silhouette synthesize_target(const StyleBasis& basis, const StyleVector& s, const PoseParams& p, bool binarize,
                             double noise, std::uint64_t seed);

// Uniform double in [0,1) from the top 53 bits; reproducible across platforms.
inline double uniform01(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
template <typename Objective>
Eigen::VectorXd finite_difference_gradient(Objective&& f, const Eigen::VectorXd& x, double h)
{
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

} // namespace reproj
