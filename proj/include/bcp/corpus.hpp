#pragma once

#include <string>
#include <vector>

#include "bcp/machine.hpp"
#include "bcp/protocol.hpp"

namespace bcp {

/// Directory holding the bundled .bcp and .cm files. Defaults to the
/// build-time location; override with the BCP_CORPUS_DIR environment variable.
std::string corpus_directory();

std::vector<std::string> corpus_protocol_names();
std::vector<std::string> corpus_machine_names();

/// Loads `<name>.bcp` / `<name>.cm` from the corpus directory.
Protocol corpus_protocol(const std::string& name);
CounterMachine corpus_machine(const std::string& name);

} // namespace bcp
