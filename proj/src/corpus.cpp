#include "bcp/corpus.hpp"

#include <cstdlib>

#include "bcp/text.hpp"

#ifndef BCP_CORPUS_DIR
#define BCP_CORPUS_DIR "corpus"
#endif

namespace bcp {

std::string corpus_directory() {
    if (const char* env = std::getenv("BCP_CORPUS_DIR")) return env;
    return BCP_CORPUS_DIR;
}

std::vector<std::string> corpus_protocol_names() {
    return {"majority", "power2", "universal-reset"};
}

std::vector<std::string> corpus_machine_names() {
    return {"cm-div3", "cm-even", "cm-geq", "cm-lt", "cm-odd"};
}

Protocol corpus_protocol(const std::string& name) {
    return load_protocol_file(corpus_directory() + "/" + name + ".bcp");
}

CounterMachine corpus_machine(const std::string& name) {
    return load_machine_file(corpus_directory() + "/" + name + ".cm");
}

} // namespace bcp
