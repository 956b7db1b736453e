#pragma once

#include <string>

#include "bcp/machine.hpp"
#include "bcp/protocol.hpp"

namespace bcp {

/// Line-oriented protocol format. `#` opens a comment only at line start or
/// after whitespace, so `#` may appear inside generated state names.
Protocol parse_protocol(const std::string& text);
std::string serialize_protocol(const Protocol& p);

/// Counter-machine format; macro transitions `src [i1; ...; ik] dst` are
/// expanded during parsing (fresh states, reversible prefix).
CounterMachine parse_machine(const std::string& text);
std::string serialize_machine(const CounterMachine& m);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

Protocol load_protocol_file(const std::string& path);
CounterMachine load_machine_file(const std::string& path);

} // namespace bcp
