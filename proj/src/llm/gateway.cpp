#include "patientsim/llm/gateway.hpp"

#include <fmt/format.h>

#include "patientsim/error.hpp"

namespace patientsim::llm {

void CallLog::append(CallRecord record) {
    std::lock_guard lock(mu_);
    records_.push_back(std::move(record));
}

std::vector<CallRecord> CallLog::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

std::size_t CallLog::size() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

std::string strip_code_fences(std::string_view raw) {
    std::string text = trim(raw);
    if (!text.starts_with("```")) return text;
    auto newline = text.find('\n');
    if (newline == std::string::npos) {
        // Single-line fence: ```{...}```
        text.erase(0, 3);
    } else {
        text.erase(0, newline + 1);
    }
    auto close = text.rfind("```");
    if (close != std::string::npos) text.erase(close);
    return trim(text);
}

namespace {

json parse_object(std::string_view raw) {
    std::string text = strip_code_fences(raw);
    auto parsed = json::parse(text, nullptr, false, true);
    if (parsed.is_discarded() || !parsed.is_object()) {
        // Prose around the object: take the outermost braces.
        auto open = text.find('{');
        auto close = text.rfind('}');
        if (open != std::string::npos && close != std::string::npos && close > open) {
            parsed = json::parse(text.substr(open, close - open + 1), nullptr, false, true);
        }
    }
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw ExtractionError("provider output is not a JSON object", std::string(raw));
    }
    return parsed;
}

bool has_path(const json& obj, std::string_view path) {
    const json* node = &obj;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto dot = path.find('.', start);
        auto key = std::string(path.substr(start, dot == std::string_view::npos ? std::string_view::npos
                                                                                 : dot - start));
        if (!node->is_object()) return false;
        auto it = node->find(key);
        if (it == node->end()) return false;
        node = &*it;
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return true;
}

}  // namespace

json extract_payload(std::string_view raw, std::span<const std::string> expected_fields) {
    json parsed = parse_object(raw);
    auto it = parsed.find("result");
    if (it == parsed.end() || !it->is_object()) {
        throw ExtractionError("provider output has no \"result\" object", std::string(raw));
    }
    for (const auto& field : expected_fields) {
        if (!has_path(*it, field)) {
            throw ExtractionError(fmt::format("provider output is missing field '{}'", field),
                                  std::string(raw));
        }
    }
    return *it;
}

Gateway::Gateway(Provider& provider, const Clock& clock, const TemplateRegistry& templates)
    : provider_(provider), clock_(clock), templates_(templates) {}

CompletionRequest Gateway::make_request(std::string_view template_name, SlotBindings bindings,
                                        GenerationSettings settings) const {
    settings.validate();
    CompletionRequest request;
    request.template_name = std::string(template_name);
    request.prompt = templates_.render(template_name, bindings);
    request.bindings = std::move(bindings);
    request.settings = std::move(settings);
    return request;
}

std::string Gateway::attempt(const CompletionRequest& request, CallLog& log, int attempt_number) {
    CallRecord record;
    record.template_name = request.template_name;
    record.prompt_hash = prompt_hash(request.prompt);
    record.prompt = request.prompt;
    record.settings = request.settings;
    record.attempt = attempt_number;
    auto started = clock_.now();
    try {
        record.response = provider_.complete(request);
    } catch (const ProviderError& e) {
        record.latency_ms = (clock_.now() - started).count();
        record.error = fmt::format("{}: {}", to_string(e.kind()), e.what());
        log.append(std::move(record));
        throw;
    }
    record.latency_ms = (clock_.now() - started).count();
    auto response = record.response;
    log.append(std::move(record));
    return response;
}

std::string Gateway::complete(const CompletionRequest& request, CallLog& log) {
    try {
        return attempt(request, log, 1);
    } catch (const ProviderError&) {
        return attempt(request, log, 2);
    }
}

json Gateway::complete_payload(const CompletionRequest& request,
                               std::span<const std::string> expected_fields, CallLog& log,
                               const PayloadCheck& check) {
    auto try_extract = [&](const std::string& raw) {
        json result = extract_payload(raw, expected_fields);
        if (check) {
            try {
                check(result);
            } catch (const ValidationError& e) {
                throw ExtractionError(e.what(), raw);
            }
        }
        return result;
    };
    std::string raw = complete(request, log);
    try {
        return try_extract(raw);
    } catch (const ExtractionError&) {
        // Re-ask once with the same prompt.
    }
    raw = complete(request, log);
    return try_extract(raw);
}

}  // namespace patientsim::llm
