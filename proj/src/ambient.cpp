#include "metagee/ambient.hpp"

#include "metagee/error.hpp"

namespace metagee {

AmbientStructure::AmbientStructure(MetallicParams params, std::vector<Axis> signs)
    : params_(params), signs_(std::move(signs)), diag_(static_cast<Eigen::Index>(signs_.size())) {
    if (signs_.empty()) throw Error("ambient structure needs at least one axis");
    const double s = params_.sigma();
    const double sb = params_.sigbar();
    for (std::size_t i = 0; i < signs_.size(); ++i) {
        diag_[static_cast<Eigen::Index>(i)] = signs_[i] == Axis::Sigma ? s : sb;
    }
}

RingElem AmbientStructure::entry(int i) const {
    return signs_.at(static_cast<std::size_t>(i)) == Axis::Sigma ? RingElem::sigma(params_)
                                                                 : RingElem::sigbar(params_);
}

Eigen::VectorXd apply_J(const AmbientStructure& s, const Eigen::VectorXd& v) {
    if (v.size() != s.n()) {
        throw Error("apply_J: vector of length " + std::to_string(v.size()) +
                    " for a structure on R^" + std::to_string(s.n()));
    }
    return s.diagonal().cwiseProduct(v);
}

bool check_metallic(const std::vector<RingElem>& diagonal) {
    for (const auto& x : diagonal) {
        const MetallicParams& pq = x.params();
        RingElem p = RingElem::rational(pq.p(), pq);
        RingElem q = RingElem::rational(pq.q(), pq);
        if (!(x * x == p * x + q)) return false;
    }
    // Compatibility g(JX,JY) = p g(JX,Y) + q g(X,Y) pairs the eigenvalues
    // on distinct axes; for two distinct roots that is sigma*sigbar = -q.
    for (std::size_t i = 0; i < diagonal.size(); ++i) {
        for (std::size_t j = i + 1; j < diagonal.size(); ++j) {
            const RingElem& x = diagonal[i];
            const RingElem& y = diagonal[j];
            if (x == y) continue;
            if (!(x * y == RingElem::rational(-x.params().q(), x.params()))) return false;
        }
    }
    return true;
}

bool check_metallic(const AmbientStructure& s) {
    std::vector<RingElem> d;
    d.reserve(static_cast<std::size_t>(s.n()));
    for (int i = 0; i < s.n(); ++i) d.push_back(s.entry(i));
    // Both roots are always checked, whatever the sign pattern.
    d.push_back(RingElem::sigma(s.params()));
    d.push_back(RingElem::sigbar(s.params()));
    return check_metallic(d);
}

JPoly compose(const JPoly& x, const JPoly& y) {
    const MetallicParams& pq = x.alpha.params();
    RingElem p = RingElem::rational(pq.p(), pq);
    RingElem q = RingElem::rational(pq.q(), pq);
    RingElem bb = x.beta * y.beta;
    return {x.alpha * y.alpha + q * bb, x.alpha * y.beta + y.alpha * x.beta + p * bb};
}

JPoly operator+(const JPoly& x, const JPoly& y) { return {x.alpha + y.alpha, x.beta + y.beta}; }

Projectors projectors(const MetallicParams& params) {
    RingElem sigma = RingElem::sigma(params);
    RingElem p = RingElem::rational(params.p(), params);
    RingElem inv = (sigma + sigma - p).inverse();
    JPoly l{sigma * inv, -inv};
    JPoly m{(sigma - p) * inv, inv};
    return {l, m};
}

Projectors projectors(const AmbientStructure& s) { return projectors(s.params()); }

} // namespace metagee
