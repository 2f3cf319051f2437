#pragma once

#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patientsim/core/ids.hpp"
#include "patientsim/llm/provider.hpp"

namespace patientsim::llm {

using json = nlohmann::json;

// Per-trace record of every provider attempt.
class CallLog {
public:
    void append(CallRecord record);
    std::vector<CallRecord> records() const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::vector<CallRecord> records_;
};

// Removes ``` / ```json wrappers and surrounding whitespace.
std::string strip_code_fences(std::string_view raw);

// Parses provider text and returns the object under the top-level "result"
// key. Every expected field path ("a" or "a.b") must be present. The returned
// object is exactly what the text contained; nothing is filled in.
// Throws ExtractionError carrying the raw text.
json extract_payload(std::string_view raw, std::span<const std::string> expected_fields);

// Extra structural validation run on an extracted payload. Throwing
// ExtractionError or ValidationError counts as an extraction failure.
using PayloadCheck = std::function<void(const json& result)>;

class Gateway {
public:
    explicit Gateway(Provider& provider, const Clock& clock,
                     const TemplateRegistry& templates = TemplateRegistry::builtin());

    CompletionRequest make_request(std::string_view template_name, SlotBindings bindings,
                                   GenerationSettings settings) const;

    // One retry with the identical payload on ProviderError, then rethrows.
    // Each attempt is appended to `log`.
    std::string complete(const CompletionRequest& request, CallLog& log);

    // complete() followed by extract_payload(). An unparseable or incomplete
    // payload triggers one re-ask with the same prompt; the second failure
    // throws ExtractionError.
    json complete_payload(const CompletionRequest& request, std::span<const std::string> expected_fields,
                          CallLog& log, const PayloadCheck& check = {});

    const TemplateRegistry& templates() const noexcept { return templates_; }

private:
    std::string attempt(const CompletionRequest& request, CallLog& log, int attempt_number);

    Provider& provider_;
    const Clock& clock_;
    const TemplateRegistry& templates_;
};

}  // namespace patientsim::llm
