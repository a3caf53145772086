#pragma once

#include <optional>

#include "pembihs/aida.hpp"
#include "pembihs/engine.hpp"
#include "pembihs/inmemory.hpp"

namespace pembihs {

enum class AlgorithmId : std::uint8_t {
    PemAStar,
    PemRAStar,
    Pemm,
    PemBaeStar,
    AidaStar,
    RAidaStar,
    AStar,
    BaeStar,
    IdaStar,
    BfsOracle,
};

inline constexpr AlgorithmId kAllAlgorithms[] = {
    AlgorithmId::PemAStar, AlgorithmId::PemRAStar, AlgorithmId::Pemm,
    AlgorithmId::PemBaeStar, AlgorithmId::AidaStar, AlgorithmId::RAidaStar,
    AlgorithmId::AStar,     AlgorithmId::BaeStar,  AlgorithmId::IdaStar,
    AlgorithmId::BfsOracle,
};

const char* algorithm_name(AlgorithmId id);  // kebab-case CLI name
std::optional<AlgorithmId> algorithm_from_name(const std::string& name);

bool is_pem_algorithm(AlgorithmId id);
bool algorithm_needs_forward_h(AlgorithmId id);
bool algorithm_needs_backward_h(AlgorithmId id);

// The policy object behind each PEM instantiation; non-PEM ids are
// unsupported here.
SearchPolicy make_policy(AlgorithmId id);

struct SolveOptions {
    EngineConfig engine;  // bucket_dir must be set for PEM algorithms
    InMemoryLimits in_memory;
};

// Uniform entry point across the whole algorithm roster.
SearchOutcome solve(AlgorithmId id, const Domain& domain, const DomainState& start,
                    const DomainState& goal, const HeuristicPair& h, const SolveOptions& options);

}  // namespace pembihs
