#include "viscowave/model.hpp"

#include <cmath>
#include <random>
#include <string>

namespace viscowave {

namespace {

void check_gates(const ModelConfig& config, double l) {
    if (config.dimension != 1 && config.dimension != 2)
        throw ConfigError("dimension must be 1 or 2");
    if (config.nodes_x < 3)
        throw ConfigError("mesh needs at least 3 nodes per direction: got nodes_x = " +
                          std::to_string(config.nodes_x));
    if (config.dimension == 2 && config.nodes_y < 3)
        throw ConfigError("mesh needs at least 3 nodes per direction: got nodes_y = " +
                          std::to_string(config.nodes_y));
    if (config.length_x <= 0.0 || (config.dimension == 2 && config.length_y <= 0.0))
        throw ConfigError("domain lengths must be positive");
    if (!(config.p > 2.0))
        throw ConfigError("interior source requires p > 2: got p = " + std::to_string(config.p));
    if (!(config.m >= 2.0))
        throw ConfigError("boundary damping requires m >= 2: got m = " + std::to_string(config.m));
    // kappa = 0 (no boundary damping) is allowed for generic runs such as the
    // conservative reduction; the regime theorems need a strictly monotone h.
    if (config.experiment != ExperimentType::Generic && !(config.kappa > 0.0))
        throw ConfigError(
            "stable/growth/blow-up experiments require a positive boundary damping "
            "coefficient: got kappa = " +
            std::to_string(config.kappa));
    if (config.kappa < 0.0)
        throw ConfigError("boundary damping coefficient must be nonnegative: got kappa = " +
                          std::to_string(config.kappa));
    if (config.alpha < 0.0)
        throw ConfigError("strong damping coefficient must be nonnegative: got alpha = " +
                          std::to_string(config.alpha));

    const KernelReport kernel_report = validate_kernel(config.kernel);
    if (!kernel_report.admissible)
        throw ConfigError(
            "inadmissible relaxation kernel: requires amplitudes >= 0, rates > 0 and total mass "
            "< 1 (got l = " +
            std::to_string(kernel_report.l) + ")");

    const bool large_data_experiment = config.experiment == ExperimentType::Growth ||
                                       config.experiment == ExperimentType::Blowup;
    if (large_data_experiment) {
        const double lower = std::max(config.m, 2.0 / l);
        if (!(config.p > lower))
            throw ConfigError("growth/blow-up experiments require max(m, 2/l) < p: got p = " +
                              std::to_string(config.p) + ", max(m, 2/l) = " +
                              std::to_string(lower));
    }
    if (config.experiment == ExperimentType::Blowup) {
        if (!(config.m > 2.0))
            throw ConfigError(
                "blow-up experiments require superlinear boundary damping m > 2: got m = " +
                std::to_string(config.m));
        if (config.alpha != 0.0)
            throw ConfigError(
                "blow-up experiments require alpha = 0 (finite-time escape is only predicted "
                "without strong damping): got alpha = " +
                std::to_string(config.alpha));
    }
}

DiscreteModel assemble_1d(const ModelConfig& config) {
    const int n_total = config.nodes_x;
    const int n = n_total - 1;  // node 0 is clamped
    const double h = config.length_x / (n_total - 1);

    DiscreteModel model;
    model.dimension = 1;
    model.x.resize(n);
    for (int i = 0; i < n; ++i) model.x[i] = (i + 1) * h;

    model.stiffness = Eigen::MatrixXd::Zero(n, n);
    model.interior_mass = Eigen::VectorXd::Zero(n);
    // Element loop over [x_k, x_{k+1}], k = 0..n_total-2; free index = global - 1.
    for (int k = 0; k + 1 < n_total; ++k) {
        const int a = k - 1;
        const int b = k;  // right node of the element, always free
        const double ke = 1.0 / h;
        if (a >= 0) {
            model.stiffness(a, a) += ke;
            model.stiffness(a, b) -= ke;
            model.stiffness(b, a) -= ke;
        }
        model.stiffness(b, b) += ke;
        if (a >= 0) model.interior_mass[a] += h / 2.0;
        model.interior_mass[b] += h / 2.0;
    }
    model.boundary_mass = Eigen::VectorXd::Zero(n);
    model.boundary_mass[n - 1] = 1.0;  // surface measure of the endpoint
    model.boundary_nodes = {n - 1};
    model.mesh_width = h;
    return model;
}

DiscreteModel assemble_2d(const ModelConfig& config) {
    const int nx = config.nodes_x;
    const int ny = config.nodes_y;
    const double hx = config.length_x / (nx - 1);
    const double hy = config.length_y / (ny - 1);

    // Free nodes are those off the clamped edge x = 0.
    const int n = (nx - 1) * ny;
    auto free_index = [nx](int i, int j) { return j * (nx - 1) + (i - 1); };

    DiscreteModel model;
    model.dimension = 2;
    model.x.resize(n);
    model.y.resize(n);
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            model.x[free_index(i, j)] = i * hx;
            model.y[free_index(i, j)] = j * hy;
        }

    model.stiffness = Eigen::MatrixXd::Zero(n, n);
    model.interior_mass = Eigen::VectorXd::Zero(n);

    // Bilinear element stiffness on an hx-by-hy rectangle via 2x2 Gauss
    // quadrature (exact for this integrand).
    Eigen::Matrix4d element = Eigen::Matrix4d::Zero();
    const double gp = 1.0 / std::sqrt(3.0);
    for (double xi : {-gp, gp})
        for (double eta : {-gp, gp}) {
            Eigen::Matrix<double, 2, 4> grad;  // physical gradients of the 4 shape functions
            const double dxi[4] = {-(1 - eta) / 4, (1 - eta) / 4, (1 + eta) / 4, -(1 + eta) / 4};
            const double deta[4] = {-(1 - xi) / 4, -(1 + xi) / 4, (1 + xi) / 4, (1 - xi) / 4};
            for (int a = 0; a < 4; ++a) {
                grad(0, a) = dxi[a] * 2.0 / hx;
                grad(1, a) = deta[a] * 2.0 / hy;
            }
            element += (hx * hy / 4.0) * grad.transpose() * grad;
        }

    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const int corner_i[4] = {i, i + 1, i + 1, i};
            const int corner_j[4] = {j, j, j + 1, j + 1};
            int dof[4];
            for (int a = 0; a < 4; ++a)
                dof[a] = corner_i[a] >= 1 ? free_index(corner_i[a], corner_j[a]) : -1;
            for (int a = 0; a < 4; ++a) {
                if (dof[a] < 0) continue;
                model.interior_mass[dof[a]] += hx * hy / 4.0;  // row-sum lumping
                for (int b = 0; b < 4; ++b)
                    if (dof[b] >= 0) model.stiffness(dof[a], dof[b]) += element(a, b);
            }
        }

    // Dynamic-boundary mass: 1D lumped line masses along the three free edges.
    model.boundary_mass = Eigen::VectorXd::Zero(n);
    auto add_segment = [&](int i0, int j0, int i1, int j1, double len) {
        if (i0 >= 1) model.boundary_mass[free_index(i0, j0)] += len / 2.0;
        if (i1 >= 1) model.boundary_mass[free_index(i1, j1)] += len / 2.0;
    };
    for (int i = 0; i + 1 < nx; ++i) {
        add_segment(i, 0, i + 1, 0, hx);            // bottom edge
        add_segment(i, ny - 1, i + 1, ny - 1, hx);  // top edge
    }
    for (int j = 0; j + 1 < ny; ++j) add_segment(nx - 1, j, nx - 1, j + 1, hy);  // right edge

    for (int k = 0; k < n; ++k)
        if (model.boundary_mass[k] > 0.0) model.boundary_nodes.push_back(k);
    model.mesh_width = std::max(hx, hy);
    return model;
}

}  // namespace

DiscreteModel build_model(const ModelConfig& config) {
    const double l = kernel_l(config.kernel);
    check_gates(config, l);

    DiscreteModel model = config.dimension == 1 ? assemble_1d(config) : assemble_2d(config);
    model.kernel = config.kernel;
    model.l = l;
    model.alpha = config.alpha;
    model.p = config.p;
    model.m = config.m;
    model.kappa = config.kappa;
    model.source_enabled = config.source_enabled;
    model.mass = model.interior_mass + model.boundary_mass;
    return model;
}

double damping_h(const DiscreteModel& model, double s) {
    return model.kappa * std::pow(std::abs(s), model.m - 2.0) * s;
}

double grad_norm_sq(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w) {
    return w.dot(model.stiffness * w);
}

double l2_norm_sq(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w) {
    return (model.interior_mass.array() * w.array().square()).sum();
}

double boundary_l2_norm_sq(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w) {
    double total = 0.0;
    for (Eigen::Index k : model.boundary_nodes) total += model.boundary_mass[k] * w[k] * w[k];
    return total;
}

double lp_pow_sum(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w,
                  double q) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        sum += model.interior_mass[i] * std::pow(std::abs(w[i]), q);
    return sum;
}

double lp_norm(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w, double q) {
    return std::pow(lp_pow_sum(model, w, q), 1.0 / q);
}

double boundary_lq_norm(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w,
                        double q) {
    double sum = 0.0;
    for (Eigen::Index k : model.boundary_nodes)
        sum += model.boundary_mass[k] * std::pow(std::abs(w[k]), q);
    return std::pow(sum, 1.0 / q);
}

Norms norms(const DiscreteModel& model, const Eigen::Ref<const Eigen::VectorXd>& w) {
    if (w.size() != model.size()) throw std::invalid_argument("norms: vector/model size mismatch");
    Norms result;
    result.l2 = std::sqrt(l2_norm_sq(model, w));
    result.h1_semi = std::sqrt(std::max(0.0, grad_norm_sq(model, w)));
    result.lp = lp_norm(model, w, model.p);
    result.l2_boundary = std::sqrt(boundary_l2_norm_sq(model, w));
    result.lm_boundary = boundary_lq_norm(model, w, model.m);
    return result;
}

Eigen::VectorXd full_grid_values(const ModelConfig& config,
                                 const Eigen::Ref<const Eigen::VectorXd>& w) {
    if (config.dimension == 1) {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(config.nodes_x);
        full.tail(config.nodes_x - 1) = w;
        return full;
    }
    const int nx = config.nodes_x;
    const int ny = config.nodes_y;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(nx * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) full[j * nx + i] = w[j * (nx - 1) + (i - 1)];
    return full;
}

Eigen::VectorXd seeded_smooth_field(const DiscreteModel& model, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    const double length_x = model.x.maxCoeff();
    Eigen::VectorXd field = Eigen::VectorXd::Zero(model.size());
    constexpr int n_modes = 6;
    if (model.dimension == 1) {
        for (int k = 1; k <= n_modes; ++k) {
            const double c = coeff(rng) / (k * k);
            const double wave = (k - 0.5) * M_PI / length_x;
            for (Eigen::Index i = 0; i < model.size(); ++i)
                field[i] += c * std::sin(wave * model.x[i]);
        }
        return field;
    }
    const double length_y = model.y.maxCoeff();
    for (int k = 1; k <= n_modes; ++k)
        for (int j = 0; j < n_modes; ++j) {
            const double c = coeff(rng) / (k * k + j * j + 1.0);
            const double wx = (k - 0.5) * M_PI / length_x;
            const double wy = j * M_PI / length_y;
            for (Eigen::Index i = 0; i < model.size(); ++i)
                field[i] += c * std::sin(wx * model.x[i]) * std::cos(wy * model.y[i]);
        }
    return field;
}

}  // namespace viscowave
