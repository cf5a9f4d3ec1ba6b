#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hpboost/mts.hpp"
#include "hpboost/paging.hpp"
#include "hpboost/tape.hpp"

namespace hpboost {

/// Paging input families over the k+1 pages 1..k+1.
///   uniform      every request uniform over the universe
///   round_robin  1, 2, ..., k+1, 1, 2, ...
///   nasty        phases of k distinct pages; each phase opens with the page
///                left out of the previous phase and visits the others in a
///                random order, so OPT pays about one fault per phase while
///                marking pays about H_k.
enum class PagingStream { kUniform, kRoundRobin, kNasty };

PagingStream parse_paging_stream(const std::string& name);
std::string to_string(PagingStream kind);

std::vector<PageId> paging_universe(std::size_t k);
/// Pages 1..k, the initial cache used with the generated streams.
std::vector<PageId> paging_initial_cache(std::size_t k);

std::vector<PageId> paging_stream(PagingStream kind, std::size_t k, std::size_t length,
                                  RandomTape& tape);

/// Random metric on n points: symmetric integer distances in [1, max_distance]
/// closed under shortest paths.
DistanceMatrix random_metric_matrix(std::size_t n, Cost max_distance, RandomTape& tape);

/// Random task vectors with entries uniform in [0, max_task]; each entry is
/// replaced by infinity with probability infinite_per_mille / 1000, but never
/// all entries of one task.
std::vector<TaskVector> random_tasks(std::size_t states, std::size_t length, Cost max_task,
                                     unsigned infinite_per_mille, RandomTape& tape);

/// Uniform permutation of 0..m-1 by a tape-driven Fisher-Yates shuffle.
std::vector<std::size_t> random_permutation(std::size_t m, RandomTape& tape);

}  // namespace hpboost
