#ifndef VISCOWAVE_MODEL_HPP
#define VISCOWAVE_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "viscowave/kernel.hpp"

namespace viscowave {

/// Raised when a configuration violates a hypothesis the requested
/// experiment needs; the message names the violated relation.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentType { Generic, StableSet, Growth, Blowup };

struct ModelConfig {
    int dimension = 1;
    double length_x = 1.0;
    double length_y = 1.0;
    int nodes_x = 101;  // grid nodes including the clamped edge
    int nodes_y = 11;   // 2D only
    double alpha = 0.0;  // strong (Kelvin-Voigt) damping coefficient, >= 0
    double p = 4.0;      // interior source exponent, > 2
    double m = 2.0;      // boundary damping exponent, >= 2
    double kappa = 1.0;  // boundary damping coefficient in h(s) = kappa |s|^{m-2} s
    bool source_enabled = true;
    KernelSpec kernel;
    ExperimentType experiment = ExperimentType::Generic;
};

/// Assembled spatial discretization on the free nodes (clamped boundary
/// eliminated).  1D: piecewise-linear elements on [0, Lx] with the left end
/// clamped and the right end dynamic.  2D: bilinear elements on a structured
/// rectangle with the left edge clamped and the other three edges dynamic.
/// Mass is lumped everywhere, so every L^q norm and boundary integral is a
/// diagonal weighted sum.
struct DiscreteModel {
    int dimension = 1;
    Eigen::VectorXd x;               // free-node coordinates
    Eigen::VectorXd y;               // 2D only (empty in 1D)
    Eigen::MatrixXd stiffness;       // K, symmetric positive definite on free nodes
    Eigen::VectorXd interior_mass;   // lumped interior mass diagonal
    Eigen::VectorXd boundary_mass;   // dynamic-boundary mass diagonal (zero off the edge)
    Eigen::VectorXd mass;            // interior_mass + boundary_mass
    std::vector<Eigen::Index> boundary_nodes;  // free-node indices on the dynamic edge

    KernelSpec kernel;
    double l = 1.0;  // residual stiffness fraction of the kernel
    double alpha = 0.0;
    double p = 4.0;
    double m = 2.0;
    double kappa = 1.0;
    bool source_enabled = true;
    double mesh_width = 0.0;  // max element edge length

    // Extra right-hand sides, used by manufactured-solution studies.  The
    // interior term is weighted by the lumped interior mass, the boundary term
    // by the boundary mass.  Null means no forcing.
    std::function<double(double x, double y, double t)> interior_forcing;
    std::function<double(double x, double y, double t)> boundary_forcing;

    Eigen::Index size() const { return stiffness.rows(); }
};

/// Displacement/velocity pair on the free nodes at time t.  The velocity of
/// the dynamic edge is the restriction of v to the boundary nodes.
struct State {
    double t = 0.0;
    Eigen::VectorXd u;
    Eigen::VectorXd v;
};

DiscreteModel build_model(const ModelConfig& config);

/// Nodal boundary damping h(v) = kappa |v|^{m-2} v.
double damping_h(const DiscreteModel& model, double s);

// Quadratic/weighted forms behind all norms.  Free functions so expressions
// like grad_norm_sq(model, u - w) stay cheap to write.
double grad_norm_sq(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w);
double l2_norm_sq(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w);
double boundary_l2_norm_sq(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w);
double lp_norm(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w, double q);
double lp_pow_sum(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w,
                  double q);
double boundary_lq_norm(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w,
                        double q);

struct Norms {
    double l2 = 0.0;           // interior L^2
    double h1_semi = 0.0;      // gradient L^2
    double lp = 0.0;           // interior L^p (model exponent)
    double l2_boundary = 0.0;  // L^2 on the dynamic edge
    double lm_boundary = 0.0;  // L^m on the dynamic edge
};

Norms norms(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w);

/// Reconstruction to the full grid: zero at the clamped nodes.
Eigen::VectorXd full_grid_values(const ModelConfig& config,
                                 const Eigen::Ref<const Eigen::VectorXd>& w);

/// Deterministic smooth random field: a finite modal sum with 1/k^2-decaying
/// uniform coefficients, vanishing on the clamped edge.  Same seed, same field.
Eigen::VectorXd seeded_smooth_field(const DiscreteModel& model, std::uint64_t seed);

}  // namespace viscowave

#endif
