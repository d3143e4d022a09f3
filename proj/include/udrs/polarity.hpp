// polarity.hpp : positive/negative/undefined marking of labels
//
// A label is positive (negative) when, in every disambiguation, the number of
// downward-monotone operators taking scope over it is even (odd); undefined
// when the count's parity varies. The computation walks the clause structure
// without enumerating disambiguations: within a clause only the mates that
// are forced above a member can contribute, and a polarity-changing mate
// whose relative position is free makes the member undefined.
#ifndef UDRS_POLARITY_HPP
#define UDRS_POLARITY_HPP

#include <map>

#include "udrs/core.hpp"
#include "udrs/modelsem.hpp"

namespace udrs {

enum class Pol { Positive, Negative, Undefined };

Pol flip(Pol p);
std::string polName(Pol p);

using PolarityMap = std::map<Label, Pol>;

PolarityMap polarity(const Udrs& u, const DeterminerTable& dt);

}  // namespace udrs

#endif
