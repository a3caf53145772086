#include "pembihs/algorithms.hpp"

namespace pembihs {

const char* algorithm_name(AlgorithmId id) {
    switch (id) {
        case AlgorithmId::PemAStar: return "pem-a-star";
        case AlgorithmId::PemRAStar: return "pem-ra-star";
        case AlgorithmId::Pemm: return "pemm";
        case AlgorithmId::PemBaeStar: return "pem-bae-star";
        case AlgorithmId::AidaStar: return "aida-star";
        case AlgorithmId::RAidaStar: return "raida-star";
        case AlgorithmId::AStar: return "a-star";
        case AlgorithmId::BaeStar: return "bae-star";
        case AlgorithmId::IdaStar: return "ida-star";
        case AlgorithmId::BfsOracle: return "bfs-oracle";
    }
    return "?";
}

std::optional<AlgorithmId> algorithm_from_name(const std::string& name) {
    for (AlgorithmId id : kAllAlgorithms)
        if (name == algorithm_name(id)) return id;
    return std::nullopt;
}

bool is_pem_algorithm(AlgorithmId id) {
    switch (id) {
        case AlgorithmId::PemAStar:
        case AlgorithmId::PemRAStar:
        case AlgorithmId::Pemm:
        case AlgorithmId::PemBaeStar:
            return true;
        default:
            return false;
    }
}

bool algorithm_needs_forward_h(AlgorithmId id) {
    switch (id) {
        case AlgorithmId::PemRAStar:
        case AlgorithmId::RAidaStar:
        case AlgorithmId::BfsOracle:
            return false;
        default:
            return true;
    }
}

bool algorithm_needs_backward_h(AlgorithmId id) {
    switch (id) {
        case AlgorithmId::PemRAStar:
        case AlgorithmId::Pemm:
        case AlgorithmId::PemBaeStar:
        case AlgorithmId::RAidaStar:
        case AlgorithmId::BaeStar:
            return true;
        default:
            return false;
    }
}

SearchPolicy make_policy(AlgorithmId id) {
    SearchPolicy p;
    switch (id) {
        case AlgorithmId::PemAStar:
            p = {DirectionRule::AlwaysForward, SchemeKind::GH, LowerBoundRule::FMin,
                 SolutionDetection::Immediate, TieBreak::LowerGFirst};
            break;
        case AlgorithmId::PemRAStar:
            p = {DirectionRule::AlwaysBackward, SchemeKind::GH, LowerBoundRule::FMin,
                 SolutionDetection::Immediate, TieBreak::LowerGFirst};
            break;
        case AlgorithmId::Pemm:
            p = {DirectionRule::MinPriority, SchemeKind::GPr, LowerBoundRule::MMBound,
                 SolutionDetection::Delayed, TieBreak::LowerGFirst};
            break;
        case AlgorithmId::PemBaeStar:
            p = {DirectionRule::Alternate, SchemeKind::GHfHb, LowerBoundRule::BBound,
                 SolutionDetection::Delayed, TieBreak::LowerGFirst};
            break;
        default:
            throw InputError(std::string("no search policy for ") + algorithm_name(id));
    }
    return p;
}

SearchOutcome solve(AlgorithmId id, const Domain& domain, const DomainState& start,
                    const DomainState& goal, const HeuristicPair& h, const SolveOptions& options) {
    if (algorithm_needs_forward_h(id) && !h.forward)
        throw InputError(std::string(algorithm_name(id)) + " needs a forward heuristic");
    if (algorithm_needs_backward_h(id) && !h.backward)
        throw InputError(std::string(algorithm_name(id)) + " needs a backward heuristic");

    if (is_pem_algorithm(id))
        return run_search(domain, start, goal, h, make_policy(id), options.engine).outcome;

    AidaConfig aida;
    aida.workers = options.engine.workers;
    aida.max_seconds = options.engine.max_seconds;
    InMemoryLimits limits = options.in_memory;
    if (options.engine.max_seconds > 0) limits.max_seconds = options.engine.max_seconds;

    switch (id) {
        case AlgorithmId::AidaStar:
            return aida_star(domain, start, goal, *h.forward, aida);
        case AlgorithmId::RAidaStar:
            // The reverse search runs from goal toward start; the backward
            // heuristic estimates exactly that distance.
            return aida_star(domain, goal, start, *h.backward, aida);
        case AlgorithmId::AStar:
            return astar(domain, start, goal, *h.forward, limits);
        case AlgorithmId::BaeStar:
            return bae_star(domain, start, goal, h, limits);
        case AlgorithmId::IdaStar:
            return ida_star(domain, start, goal, *h.forward, limits);
        case AlgorithmId::BfsOracle:
            return bfs_oracle(domain, start, goal, limits);
        default:
            throw InputError("unhandled algorithm id");
    }
}

}  // namespace pembihs
