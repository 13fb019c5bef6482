#include "cdc/symbol.hpp"

#include <mutex>
#include <shared_mutex>
#include <unordered_set>

namespace cdc::detail {

namespace {

struct StringTable {
    std::shared_mutex mutex;
    // Node-based: element addresses survive rehashing.
    std::unordered_set<std::string> strings;
};

StringTable& table() {
    static StringTable t;
    return t;
}

}  // namespace

const std::string* intern_string(std::string_view text) {
    auto& t = table();
    std::string key(text);
    {
        std::shared_lock lock(t.mutex);
        if (auto it = t.strings.find(key); it != t.strings.end()) return &*it;
    }
    std::unique_lock lock(t.mutex);
    return &*t.strings.insert(std::move(key)).first;
}

}  // namespace cdc::detail
