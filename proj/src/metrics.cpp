#include "fedsim/metrics.hpp"

#include <Eigen/Eigenvalues>

#include "fedsim/errors.hpp"
#include "fedsim/quadratic.hpp"

namespace fedsim {

BgdSample measure_bgd(const std::vector<std::shared_ptr<const Objective>>& clients,
                      const Vec& x) {
    if (clients.empty()) throw ParameterError("measure_bgd: no clients");
    Vec mean_grad = zeros(x.size());
    double local_sq_sum = 0.0;
    for (const auto& c : clients) {
        const Vec g = c->exact_gradient(x);
        local_sq_sum += squared_norm(g);
        axpy_inplace(1.0, g, mean_grad);
    }
    const double n = static_cast<double>(clients.size());
    BgdSample out;
    out.local_sq_mean = local_sq_sum / n;
    out.full_sq = squared_norm(scaled(1.0 / n, mean_grad));
    return out;
}

double measure_bhd(const std::vector<std::shared_ptr<const Objective>>& clients) {
    if (clients.empty()) throw ParameterError("measure_bhd: no clients");
    for (const auto& c : clients) {
        if (!c->has_hessian())
            throw UnsupportedError("measure_bhd: requires Hessian access (quadratic clients)");
    }
    const auto d = clients.front()->hessian().rows();
    Eigen::MatrixXd mean_A = Eigen::MatrixXd::Zero(d, d);
    for (const auto& c : clients) mean_A += c->hessian();
    mean_A /= static_cast<double>(clients.size());

    double max_dev = 0.0;
    for (const auto& c : clients) {
        const Eigen::MatrixXd diff = c->hessian() - mean_A;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(diff, Eigen::EigenvaluesOnly);
        const double spectral = eig.eigenvalues().cwiseAbs().maxCoeff();
        max_dev = std::max(max_dev, spectral);
    }
    return max_dev;
}

}  // namespace fedsim
