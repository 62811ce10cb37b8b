#include "qtwtt/fiber_link.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qtwtt/rng.hpp"

namespace qtwtt {

void FiberLink::validate() const
{
    if (!(length_km > 0))
        throw std::invalid_argument("FiberLink: length must be > 0");
    if (loss_db_fwd < 0 || loss_db_bwd < 0)
        throw std::invalid_argument("FiberLink: negative loss");
    if (dispersion_sigma_fwd_fs < 0 || dispersion_sigma_bwd_fs < 0)
        throw std::invalid_argument("FiberLink: negative dispersion sigma");
    if (!std::isfinite(drift_rate_fs_per_s))
        throw std::invalid_argument("FiberLink: non-finite drift rate");
}

void AttackSpec::validate() const
{
    if (magnitude.fs > static_cast<int128>(INT64_MAX) ||
        magnitude.fs < static_cast<int128>(INT64_MIN))
        throw std::invalid_argument("AttackSpec: magnitude out of range");
}

FiberLink apply_attack(FiberLink link, const AttackSpec& attack)
{
    attack.validate();
    if (attack.kind == AttackSpec::Kind::symmetric)
        link.base_delay += attack.magnitude;
    else
        link.asym_delay += attack.magnitude;
    return link;
}

FiberLink ndc_configuration(FiberLink link, bool enabled)
{
    if (!enabled)
        return link;
    // sqrt(121^2 + 52^2 - 2*51^2) ps in fs; see header.
    constexpr double kNdcSigmaFs = 110195.281;
    link.dispersion_sigma_fwd_fs = kNdcSigmaFs;
    link.dispersion_sigma_bwd_fs = kNdcSigmaFs;
    return link;
}

std::vector<TimeTag> propagate(const std::vector<TimeTag>& times, const FiberLink& link,
                               Direction dir, TimeTag epoch, std::uint64_t seed,
                               const std::optional<AttackSpec>& attack)
{
    link.validate();
    const double loss_db = dir == Direction::forward ? link.loss_db_fwd : link.loss_db_bwd;
    const double survival = std::pow(10.0, -loss_db / 10.0);
    const double sigma = dir == Direction::forward ? link.dispersion_sigma_fwd_fs
                                                   : link.dispersion_sigma_bwd_fs;
    Duration fixed = link.base_delay;
    if (dir == Direction::forward)
        fixed += link.asym_delay;

    Duration attack_term{};
    TimeTag attack_start{};
    if (attack) {
        attack->validate();
        attack_start = attack->start;
        if (attack->kind == AttackSpec::Kind::symmetric ||
            dir == Direction::forward)
            attack_term = attack->magnitude;
    }

    Rng rng(seed);
    std::vector<TimeTag> out;
    out.reserve(static_cast<std::size_t>(times.size() * survival) + 16);
    for (const TimeTag& t : times) {
        if (!rng.bernoulli(survival)) continue;
        Duration delay = fixed;
        if (link.drift_rate_fs_per_s != 0.0)
            delay += Duration::from_fs_double(link.drift_rate_fs_per_s *
                                              elapsed_seconds(t, epoch));
        if (sigma > 0)
            delay += Duration::from_fs_double(rng.gaussian(sigma));
        if (attack && attack_term.fs != 0 && t >= attack_start)
            delay += attack_term;
        out.push_back(tag_add(t, delay));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace qtwtt
