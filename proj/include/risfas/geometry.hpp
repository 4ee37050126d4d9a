#pragma once

#include <Eigen/Dense>

namespace risfas {

// Planar fluid-antenna port grid: n1 x n2 ports evenly spaced over an
// aperture of w1 x w2 wavelengths. All lengths are stored normalized to the
// carrier wavelength.
struct PortGrid {
    int n1 = 1;
    int n2 = 1;
    double w1 = 0.0;
    double w2 = 0.0;

    int total() const { return n1 * n2; }
    void validate() const; // throws std::invalid_argument
};

struct PortIndex2d {
    int i1 = 1; // 1-based along axis 1
    int i2 = 1; // 1-based along axis 2
};

// Row-major 1D -> 2D port index map: n = (i1-1)*n2 + i2, all indices 1-based.
PortIndex2d port_index_to_2d(const PortGrid& grid, int n);

// Jake's-model spatial correlation between two ports:
// sinc(2 * euclidean distance in wavelengths). A single-port axis contributes
// zero displacement.
double spatial_correlation(const PortGrid& grid, int n, int m);

// Symmetric unit-diagonal port correlation matrix with diagonal-loading
// regularization metadata.
class CorrelationMatrix {
public:
    CorrelationMatrix() = default;

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Eigen::MatrixXd& matrix() const { return mat_; }

    double loading_delta() const { return delta_; }
    double min_eigenvalue_before() const { return min_eig_before_; }
    // Loading larger than 1e-3 distorts the copula geometry noticeably.
    bool ill_conditioned() const { return delta_ > 1e-3; }

    // Build directly from an already-valid correlation matrix (tests, ad hoc
    // dependence structures). Applies the same eigenvalue floor policy.
    static CorrelationMatrix from_matrix(Eigen::MatrixXd r, double eps_floor = 1e-10);

private:
    friend CorrelationMatrix correlation_matrix(const PortGrid&, double);

    Eigen::MatrixXd mat_{Eigen::MatrixXd::Identity(1, 1)};
    double delta_ = 0.0;
    double min_eig_before_ = 1.0;
};

// Assemble the pairwise sinc correlations for `grid`; if the smallest
// eigenvalue falls below eps_floor, apply the minimal diagonal loading
// R' = (R + dI)/(1+d) restoring it.
CorrelationMatrix correlation_matrix(const PortGrid& grid, double eps_floor = 1e-10);

} // namespace risfas
