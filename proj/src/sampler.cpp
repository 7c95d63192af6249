#include "svt/sampler.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "svt/errors.hpp"
#include "svt/rng.hpp"

namespace svt {

bool BatchPlan::operator==(const BatchPlan& other) const {
    if (sample_ids != other.sample_ids || groups.size() != other.groups.size())
        return false;
    for (std::size_t g = 0; g < groups.size(); ++g)
        if (groups[g].seed_class != other.groups[g].seed_class ||
            groups[g].members != other.groups[g].members)
            return false;
    return true;
}

BatchPlan draw_batch(const ClassIndex& index, const MarginTable& table,
                     const SamplerConfig& cfg, int epoch, int step) {
    if (cfg.s_prime < 1 || cfg.m_prime < 1 || cfg.t_prime < 1)
        throw std::invalid_argument("sampler counts must be >= 1");
    if (cfg.s_prime * cfg.m_prime * cfg.t_prime < 2)
        throw std::invalid_argument("batch size S'*M'*t' must be >= 2");

    std::vector<NodeId> classes;
    classes.reserve(index.size());
    for (const auto& [leaf, ids] : index) {
        if (ids.empty())
            throw EmptyLeaf("class node " + std::to_string(leaf) +
                            " has no samples");
        classes.push_back(leaf);  // std::map keeps these ascending
    }

    const std::size_t needed =
        static_cast<std::size_t>(std::max(cfg.s_prime, cfg.m_prime));
    if (classes.size() < needed)
        throw TooFewClasses(std::to_string(classes.size()) +
                            " leaf classes, need at least " +
                            std::to_string(needed));

    Rng rng(mix_seed({cfg.seed, static_cast<std::uint64_t>(epoch),
                      static_cast<std::uint64_t>(step)}));

    BatchPlan plan;
    const auto seeds = rng.sample_without_replacement(
        classes, static_cast<std::size_t>(cfg.s_prime));

    for (NodeId seed_class : seeds) {
        BatchPlan::Group group;
        group.seed_class = seed_class;
        group.members.push_back(seed_class);

        std::vector<NodeId> others;
        others.reserve(classes.size() - 1);
        for (NodeId c : classes)
            if (c != seed_class) others.push_back(c);

        const std::size_t neighbors = static_cast<std::size_t>(cfg.m_prime) - 1;
        if (table.epoch() == 1) {
            // no visual signal yet; ranking would be vacuous
            const auto picked = rng.sample_without_replacement(others, neighbors);
            group.members.insert(group.members.end(), picked.begin(),
                                 picked.end());
        } else {
            std::sort(others.begin(), others.end(),
                      [&](NodeId a, NodeId b) {
                          const double sa = table.visual(seed_class, a);
                          const double sb = table.visual(seed_class, b);
                          if (sa != sb) return sa < sb;
                          return a < b;
                      });
            group.members.insert(group.members.end(), others.begin(),
                                 others.begin() + neighbors);
        }

        for (NodeId member : group.members) {
            const auto& ids = index.at(member);
            const std::size_t t = static_cast<std::size_t>(cfg.t_prime);
            if (ids.size() < t) {
                for (std::size_t k = 0; k < t; ++k)
                    plan.sample_ids.push_back(ids[rng.below(ids.size())]);
            } else {
                const auto picked = rng.sample_without_replacement(ids, t);
                plan.sample_ids.insert(plan.sample_ids.end(), picked.begin(),
                                       picked.end());
            }
        }
        plan.groups.push_back(std::move(group));
    }
    return plan;
}

}  // namespace svt
