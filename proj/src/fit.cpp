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
#include "reproj/fit.hpp"

#include "reproj/warp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace reproj {

void FitConfig::validate() const
{
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw std::invalid_argument("FitConfig: " + what);
        }
    };
    require(restarts > 0, "restarts must be positive");
    require(iterations > 0, "iterations must be positive");
    require(step_size > 0.0, "step_size must be positive");
    require(beta1 >= 0.0 && beta1 < 1.0, "beta1 must lie in [0,1)");
    require(beta2 >= 0.0 && beta2 < 1.0, "beta2 must lie in [0,1)");
    require(adam_epsilon > 0.0, "adam_epsilon must be positive");
    require(loss_tolerance >= 0.0, "loss_tolerance must be nonnegative");
    require(threads >= 0, "threads must be nonnegative");
}

namespace {

Twist<double> sample_twist_in_ball(std::uint64_t seed)
{
    constexpr double pi = std::numbers::pi;
    std::mt19937_64 rng(seed);
    for (;;) {
        Twist<double> w;
        for (int i = 0; i < 3; ++i) {
            w[i] = pi * (2.0 * uniform01(rng()) - 1.0);
        }
        if (w.norm() <= pi) {
            return w;
        }
    }
}

void check_inputs(const Silhouette& m_gt, const StyleBasis& basis, const FitConfig& config)
{
    config.validate();
    if (m_gt.q() != basis.q) {
        throw std::invalid_argument("fit: target side " + std::to_string(m_gt.q()) + " does not match basis side " +
                                    std::to_string(basis.q));
    }
}

FitResult run_adam(const Silhouette& m_gt, const StyleBasis& basis, const FitConfig& config, const FitStart& start)
{
    const int m = basis.m();
    if (start.s.size() != m) {
        throw std::invalid_argument("fit: start style has " + std::to_string(start.s.size()) + " entries, basis has " +
                                    std::to_string(m));
    }
    const Eigen::Index n = m + 5;
    Eigen::VectorXd x(n);
    x << start.s, start.p.twist, start.p.translation;
    x.segment<3>(m) = wrap_to_ball<double>(x.segment<3>(m));

    Eigen::VectorXd first = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd second = Eigen::VectorXd::Zero(n);
    double b1t = 1.0, b2t = 1.0;

    FitResult res;
    res.final_loss = std::numeric_limits<double>::infinity();
    const double stop_at = clamp_floor_loss() + config.loss_tolerance;

    auto unpack = [m](const Eigen::VectorXd& v, StyleVector& s, PoseParams& p) {
        s = v.head(m);
        p.twist = v.segment<3>(m);
        p.translation = v.tail<2>();
    };

    StyleVector s;
    PoseParams p;
    for (int it = 0;; ++it) {
        unpack(x, s, p);
        const LossGradient lg = full_gradient(basis, s, p, m_gt);
        if (!std::isfinite(lg.loss)) {
            throw std::runtime_error("fit: non-finite loss at iteration " + std::to_string(it));
        }
        res.loss_trace.push_back(lg.loss);
        if (lg.loss < res.final_loss) {
            res.final_loss = lg.loss;
            res.s = s;
            res.p = p;
        }
        if (it == config.iterations || lg.loss <= stop_at) {
            res.iterations_run = it;
            break;
        }
        Eigen::VectorXd g(n);
        g << lg.grad_style, lg.grad_pose;
        first = config.beta1 * first + (1.0 - config.beta1) * g;
        second = config.beta2 * second + (1.0 - config.beta2) * g.cwiseAbs2();
        b1t *= config.beta1;
        b2t *= config.beta2;
        const Eigen::ArrayXd mhat = first.array() / (1.0 - b1t);
        const Eigen::ArrayXd vhat = second.array() / (1.0 - b2t);
        x.array() -= config.step_size * mhat / (vhat.sqrt() + config.adam_epsilon);
        x.segment<3>(m) = wrap_to_ball<double>(x.segment<3>(m));
    }
    res.restart_losses = {res.final_loss};
    return res;
}

} // namespace

FitResult fit_from(const Silhouette& m_gt, const StyleBasis& basis, const FitConfig& config, const FitStart& start)
{
    check_inputs(m_gt, basis, config);
    return run_adam(m_gt, basis, config, start);
}

FitResult fit_pose_style(const Silhouette& m_gt, const StyleBasis& basis, const FitConfig& config)
{
    check_inputs(m_gt, basis, config);
    const int restarts = config.restarts;
    std::vector<FitResult> results(static_cast<std::size_t>(restarts));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(restarts));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < restarts; r = next++) {
            try {
                FitStart start;
                start.s = StyleVector::Zero(basis.m());
                start.p.twist = sample_twist_in_ball(config.seed + static_cast<std::uint64_t>(r));
                results[static_cast<std::size_t>(r)] = run_adam(m_gt, basis, config, start);
            } catch (...) {
                errors[static_cast<std::size_t>(r)] = std::current_exception();
            }
        }
    };
    const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int n_threads = std::min(restarts, config.threads > 0 ? config.threads : hw);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    int best = 0;
    std::vector<double> losses;
    for (int r = 0; r < restarts; ++r) {
        const double l = results[static_cast<std::size_t>(r)].final_loss;
        losses.push_back(l);
        if (l < results[static_cast<std::size_t>(best)].final_loss) {
            best = r;
        }
    }
    FitResult out = std::move(results[static_cast<std::size_t>(best)]);
    out.restart_index = best;
    out.restart_losses = std::move(losses);
    return out;
}

Silhouette synthesize_target(const StyleBasis& basis, const StyleVector& s, const PoseParams& p, bool binarize,
                             double noise, std::uint64_t seed)
{
    if (!(noise >= 0.0 && noise < 0.5)) {
        throw std::invalid_argument("synthesize_target: noise " + std::to_string(noise) + " outside [0, 0.5)");
    }
    if (!binarize && noise > 0.0) {
        throw std::invalid_argument("synthesize_target: noise requires a binarized target");
    }
    const VoxelGrid posed = transform_grid(generate(basis, s), p);
    if (!binarize) {
        return project_soft(posed);
    }
    Silhouette sil = project_max(posed);
    Eigen::VectorXd v = sil.values().unaryExpr([](double x) { return x >= 0.5 ? 1.0 : 0.0; });
    if (noise > 0.0) {
        std::mt19937_64 rng(seed);
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            if (uniform01(rng()) < noise) {
                v[j] = 1.0 - v[j];
            }
        }
    }
    return Silhouette(sil.q(), std::move(v));
}

} // namespace reproj
