#pragma once

#include <vector>

#include "grag/kgraph.hpp"
#include "grag/llm.hpp"

namespace grag::extract {

struct ExtractOptions {
    std::size_t parallelism = 4;
    bool use_cache = true;
};

/// Runs entity/relationship/claim extraction over every chunk with bounded
/// parallelism. A chunk whose response cannot be parsed gets one repair
/// re-prompt; if that also fails the chunk is recorded in failed_chunks and
/// the batch continues. Results keep chunk order regardless of scheduling.
kgraph::RawElements extract_elements(const std::vector<kgraph::Chunk>& chunks, llm::Gateway& gateway,
                                     const llm::ChatDefaults& defaults,
                                     const ExtractOptions& options = {});

}  // namespace grag::extract
