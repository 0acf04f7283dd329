#pragma once

#include "laxkit/exact.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace laxkit {

enum class Family { A, B, C, D, G2 };

Family parse_family(std::string_view name);
std::string family_name(Family f);

// For family A the integer parameter is the matrix size n (gl(n), roots A_{n-1}).
// For B, C, D it is the rank n of B_n, C_n, D_n. G2 takes 2.
struct RootSystem {
    Family family = Family::A;
    int parameter = 0;
    std::vector<ExactVector> simple_roots;
    std::vector<ExactVector> positive_roots;
    // Coefficients of each positive root over the simple roots.
    std::vector<std::vector<int>> expansions;
    ExactVector highest_root;
    std::vector<int> highest_expansion;

    std::size_t rank() const { return simple_roots.size(); }
};

RootSystem build_root_system(Family family, int parameter);

struct RootGrading {
    std::vector<int> degrees;  // one per positive root, same order as RootSystem::positive_roots
    int depth = 0;
};

// Positive roots get degree -(multiplicity of the chosen simple root); `dual` flips the sign.
// `simple_index` is 1-based.
RootGrading grading_by_simple_root(const RootSystem& rs, int simple_index, bool dual = false);

class MatrixAlgebra {
public:
    Family family() const { return family_; }
    int parameter() const { return parameter_; }
    bool traceless() const { return traceless_; }
    const std::string& name() const { return name_; }

    std::size_t dim() const { return basis_.size(); }
    std::size_t size() const { return form_.rows(); }
    // Rank of the (reductive) algebra: n for gl(n).
    int rank() const { return rank_; }

    const std::vector<ExactMatrix>& basis() const { return basis_; }
    const std::vector<ExactMatrix>& cartan_basis() const { return cartan_; }
    // Invariant bilinear form sigma with X^t sigma + sigma X = 0; identity for A.
    const ExactMatrix& form() const { return form_; }

    std::optional<ExactVector> coordinates(const ExactMatrix& x) const;
    bool contains(const ExactMatrix& x) const { return coordinates(x).has_value(); }
    ExactMatrix element(const ExactVector& coords) const;

    // Exact structure constants: [B_i, B_j] = sum_k c[i][j][k] B_k.
    std::vector<std::vector<ExactVector>> structure_constants() const;

    // Diagonal grading element for a simple root (1-based), negated fundamental coweight.
    ExactMatrix grading_element(int simple_index, bool dual = false) const;
    int simple_root_count() const;

    ExactMatrix random_element(std::mt19937_64& rng, long num_bound = 4, long den_bound = 3) const;

private:
    friend MatrixAlgebra matrix_realization(Family, int);
    friend MatrixAlgebra special_linear(int);

    void finalize();

    Family family_ = Family::A;
    int parameter_ = 0;
    bool traceless_ = false;
    int rank_ = 0;
    std::string name_;
    std::vector<ExactMatrix> basis_;
    std::vector<ExactMatrix> cartan_;
    ExactMatrix form_;
    // Vector-representation weights in ambient root coordinates, and simple roots there.
    std::vector<ExactVector> weights_;
    std::vector<ExactVector> simple_roots_;
    // Coordinate extraction: a set of independent entry positions and the inverse of the
    // basis restricted to them.
    std::vector<std::size_t> pivot_entries_;
    ExactMatrix pivot_inverse_;
};

// gl(n), so(2n+1), sp(2n), so(2n), or the 7-dimensional G2. Commutator closure is checked.
MatrixAlgebra matrix_realization(Family family, int parameter);
MatrixAlgebra special_linear(int n);

class GradedDecomposition {
public:
    const MatrixAlgebra& algebra() const { return *algebra_; }
    std::shared_ptr<const MatrixAlgebra> algebra_ptr() const { return algebra_; }
    const ExactMatrix& grading_element() const { return h_; }
    int depth() const { return depth_; }
    int min_degree() const { return min_degree_; }
    int max_degree() const { return max_degree_; }

    // Basis of g_p (empty outside the support).
    const std::vector<ExactMatrix>& subspace(int p) const;
    std::size_t dim(int p) const { return subspace(p).size(); }
    // dim of the filtration space sum_{q <= p} g_q.
    std::size_t filtration_dim(int p) const;
    std::size_t filtration_codim(int p) const { return algebra_->dim() - filtration_dim(p); }

    // Graded components of an algebra element; throws if x is not in the algebra.
    std::map<int, ExactMatrix> components(const ExactMatrix& x) const;
    ExactMatrix project(const ExactMatrix& x, int p) const;
    // True when every component of degree > p vanishes.
    bool in_filtration(const ExactMatrix& x, int p) const;

    // The whole graded basis and the degree of each element.
    const std::vector<ExactMatrix>& graded_basis() const { return graded_basis_; }
    const std::vector<int>& graded_degrees() const { return graded_degrees_; }
    ExactVector graded_coordinates(const ExactMatrix& x) const;

    // sum_{p=-k}^{k-1} codim of the filtration spaces.
    std::size_t gamma_codimension() const;
    // sum_{i=-k}^{-1} dim of the filtration spaces.
    std::size_t negative_filtration_sum() const;

private:
    friend GradedDecomposition graded_subspaces(std::shared_ptr<const MatrixAlgebra>, const ExactMatrix&);

    std::shared_ptr<const MatrixAlgebra> algebra_;
    ExactMatrix h_;
    int depth_ = 0;
    int min_degree_ = 0;
    int max_degree_ = 0;
    std::map<int, std::vector<ExactMatrix>> subspaces_;
    std::vector<ExactMatrix> graded_basis_;
    std::vector<int> graded_degrees_;
    ExactMatrix to_graded_;  // algebra coordinates -> graded coordinates
};

// Eigenspace decomposition of ad h. Throws std::invalid_argument if ad h does not preserve the
// algebra, or its eigenvalues are not integers (sum of eigenspace dimensions != dim g).
GradedDecomposition graded_subspaces(std::shared_ptr<const MatrixAlgebra> algebra, const ExactMatrix& h);

// Grading of matrix_realization(family, parameter) by a simple root.
std::shared_ptr<const GradedDecomposition> catalog_grading(Family family, int parameter, int simple_index,
                                                           bool dual = false);

struct GradingDiagnostics {
    bool dimensions_sum = false;
    bool symmetric = false;
    bool bracket_compatible = false;
    bool form_orthogonal = false;
    bool gamma_codimension = false;  // c_gamma == k * dim g
    bool all() const { return dimensions_sum && symmetric && bracket_compatible && form_orthogonal && gamma_codimension; }
};

GradingDiagnostics check_grading(const GradedDecomposition& dec);

// dim g - (sum_{i=-k}^{-1} dim filtration_i + 1) * rank.
long check_mist_identity(const GradedDecomposition& dec);
// multiple * dim g - (sum_{i=-k}^{-1} dim filtration_i + 1) * point_count.
long mist_balance(const GradedDecomposition& dec, long multiple, long point_count);

// Degrees of basic invariant polynomials. Family A lists 1..n (gl(n)).
std::vector<int> invariant_degrees(Family family, int parameter);
// dim g - sum (2 d_i - 1), over the simple part (sl(n) for family A).
long check_degree_identity(Family family, int parameter);

// Dimension and rank of the simple algebra (sl(n) for family A).
long simple_dimension(Family family, int parameter);
long simple_rank(Family family, int parameter);

struct HamiltonianCount {
    long count = 0;
    // 2N - (dim g * deg D + r (deg D - 2 (genus - 1))), expected 0.
    long identity_residual = 0;
};

HamiltonianCount hamiltonian_count(Family family, int parameter, long divisor_degree, long genus);

}  // namespace laxkit
