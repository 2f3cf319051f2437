#pragma once

#include <string>

#include "patientsim/core/types.hpp"
#include "patientsim/llm/prompt_template.hpp"

namespace patientsim::llm {

// A rendered prompt plus what produced it. Scripted providers match on the
// template name and slot bindings; live providers only read prompt/settings.
struct CompletionRequest {
    std::string template_name;
    SlotBindings bindings;
    std::string prompt;
    GenerationSettings settings;
};

// Text-generation backend. Implementations must be safe for concurrent calls
// and signal failures with ProviderError.
class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string complete(const CompletionRequest& request) = 0;
};

// Stable content hash of a rendered prompt: lowercase hex SHA-256.
std::string prompt_hash(std::string_view prompt);

}  // namespace patientsim::llm
