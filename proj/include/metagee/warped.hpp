#pragma once

#include "metagee/identity.hpp"
#include "metagee/slant.hpp"
#include "metagee/submanifold.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metagee {

/// f and d(ln f) in coordinates at a point, from the warping jet.
struct WarpingJet {
    double f = 0.0;
    Eigen::VectorXd dlnf;
};

WarpingJet warping_at(const ImmersionSpec& spec, const Eigen::VectorXd& u);

/// Types of the base and fiber factors, from the coordinate subspaces.
struct FactorTypes {
    AngleReport base;
    AngleReport fiber;
};

/// Everything the identity catalog needs, computed once per spec.
struct CatalogContext {
    CatalogContext(const ImmersionSpec& spec, double tol_scale = 1.0, int points_per_param = 0);

    ImmersionSpec spec;
    double scale;
    int grid;
    std::vector<Eigen::VectorXd> points;
    Classification classification;
    std::optional<FactorTypes> factors;
    std::vector<int> base;
    std::vector<int> fiber;
};

/// Every tag in catalog order.
const std::vector<std::string>& identity_tags();
bool is_identity_tag(std::string_view tag);
std::string_view identity_anchor(std::string_view tag);

/// Empty when the identity applies, otherwise the unmet requirement.
std::optional<std::string> unmet_requirement(const CatalogContext& ctx, std::string_view tag);

/// Throws NotApplicable ("identity not applicable: ...") when the
/// structural requirements are not met.
IdentityResult check_identity(const CatalogContext& ctx, std::string_view tag);
IdentityResult check_identity(const ImmersionSpec& spec, std::string_view tag, double tol_scale = 1.0);

/// Evaluates the given tags, sharing finite-difference stencils.
std::vector<IdentityResult> check_identities(const CatalogContext& ctx, const std::vector<std::string>& tags);
/// All applicable tags in catalog order.
std::vector<std::string> applicable_tags(const CatalogContext& ctx);

IdentityResult verify_warped_metric(const ImmersionSpec& spec, double tol_scale = 1.0, int points_per_param = 0);

struct ObstructionReport {
    /// Factor types as "base x fiber", e.g. "invariant x anti-invariant".
    std::string product_type;
    /// Non-existence statement whose hypothesis matches, if any.
    std::string theorem;
    bool hypothesis_matches = false;
    double max_dlnf = 0.0;
    bool f_constant = false;
    bool contradiction = false;
    std::string verdict;
    std::vector<IdentityResult> checks;
};

ObstructionReport obstruction_report(const CatalogContext& ctx);
ObstructionReport obstruction_report(const ImmersionSpec& spec, double tol_scale = 1.0);

} // namespace metagee
