#include <array>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "patientsim/llm/provider.hpp"

namespace patientsim::llm {

std::string prompt_hash(std::string_view prompt) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_Digest(prompt.data(), prompt.size(), digest.data(), &len, EVP_sha256(), nullptr);
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
}

}  // namespace patientsim::llm
