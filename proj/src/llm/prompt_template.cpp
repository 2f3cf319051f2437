#include "patientsim/llm/prompt_template.hpp"

#include <cctype>

#include <fmt/format.h>

#include "patientsim/error.hpp"
#include "patientsim/llm/templates.hpp"

namespace patientsim::llm {

namespace {

bool is_slot_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// Length of the slot name starting after the '{' at `open`, or 0 when the
// brace does not open a `{identifier}` region.
std::size_t slot_name_length(std::string_view body, std::size_t open) {
    std::size_t i = open + 1;
    while (i < body.size() && is_slot_char(body[i])) ++i;
    if (i == open + 1 || i >= body.size() || body[i] != '}') return 0;
    return i - open - 1;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string name, std::string body,
                               std::set<std::string, std::less<>> required_slots)
    : name_(std::move(name)), body_(std::move(body)), slots_(std::move(required_slots)) {
    for (const auto& slot : slots_) {
        if (body_.find("{" + slot + "}") == std::string::npos) {
            throw RenderError(slot, fmt::format("template '{}' declares slot '{}' but never uses it",
                                                name_, slot));
        }
    }
}

std::string PromptTemplate::render(const SlotBindings& bindings) const {
    for (const auto& slot : slots_) {
        if (!bindings.contains(slot)) {
            throw RenderError(slot, fmt::format("template '{}' is missing slot '{}'", name_, slot));
        }
    }
    std::string out;
    out.reserve(body_.size() + 256);
    std::string_view body = body_;
    std::size_t pos = 0;
    while (pos < body.size()) {
        auto open = body.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(body.substr(pos));
            break;
        }
        out.append(body.substr(pos, open - pos));
        auto len = slot_name_length(body, open);
        auto name = body.substr(open + 1, len);
        if (len > 0 && slots_.contains(name)) {
            out.append(bindings.find(name)->second);
            pos = open + len + 2;
        } else {
            out.push_back('{');
            pos = open + 1;
        }
    }
    return out;
}

void TemplateRegistry::add(PromptTemplate tmpl) {
    auto name = tmpl.name();
    templates_.insert_or_assign(std::move(name), std::move(tmpl));
}

bool TemplateRegistry::contains(std::string_view name) const {
    return templates_.find(name) != templates_.end();
}

const PromptTemplate& TemplateRegistry::get(std::string_view name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) {
        throw RenderError("", fmt::format("template '{}' is not registered", name));
    }
    return it->second;
}

std::string TemplateRegistry::render(std::string_view name, const SlotBindings& bindings) const {
    return get(name).render(bindings);
}

std::set<std::string> TemplateRegistry::names() const {
    std::set<std::string> out;
    for (const auto& [name, _] : templates_) out.insert(name);
    return out;
}

const TemplateRegistry& TemplateRegistry::builtin() {
    static const TemplateRegistry registry = [] {
        TemplateRegistry r;
        for (auto& t : builtin_templates()) r.add(std::move(t));
        return r;
    }();
    return registry;
}

}  // namespace patientsim::llm
