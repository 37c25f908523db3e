#pragma once

#include <stdexcept>
#include <string>

namespace afc {

// Base class for every error the library raises. Messages are prefixed with
// the area that detected the problem (e.g. "graph: ...", "stress: ...").
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// graph construction
class DisconnectedGraph : public Error {
public:
    using Error::Error;
};
class DuplicateEdge : public Error {
public:
    using Error::Error;
};
class SelfLoop : public Error {
public:
    using Error::Error;
};
class MissingWeight : public Error {
public:
    using Error::Error;
};

// reference shapes
class DegenerateShape : public Error {
public:
    using Error::Error;
};
class TooFewAgents : public Error {
public:
    using Error::Error;
};
class RankDeficient : public Error {
public:
    using Error::Error;
};

// stress-weight design
class NoValidStress : public Error {
public:
    using Error::Error;
};
class NullSpaceEmpty : public Error {
public:
    using Error::Error;
};

// motion-parameter design
class InfeasibleAgent : public Error {
public:
    InfeasibleAgent(int agent_1based, const std::string& msg)
        : Error(msg), agent(agent_1based) {}
    int agent;  // 1-based agent index whose local solve failed
};

// control law and gain certification
class NonpositiveGain : public Error {
public:
    using Error::Error;
};
class MissingNeighborMeasurement : public Error {
public:
    MissingNeighborMeasurement(int agent_1based, int neighbor_1based,
                               const std::string& msg)
        : Error(msg), agent(agent_1based), neighbor(neighbor_1based) {}
    int agent;
    int neighbor;
};
class KernelMismatch : public Error {
public:
    using Error::Error;
};

// simulation
class StepTooLarge : public Error {
public:
    using Error::Error;
};

// scenario files
class ParseError : public Error {
public:
    ParseError(int line_1based, const std::string& msg)
        : Error(msg), line(line_1based) {}
    int line;  // 1-based line number in the scenario text
};
class ValidationError : public Error {
public:
    ValidationError(const std::string& field_name, const std::string& msg)
        : Error(msg), field(field_name) {}
    std::string field;  // offending scenario field or key
};

}  // namespace afc
