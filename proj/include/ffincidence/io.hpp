#pragma once

#include <iosfwd>
#include <string>

#include "ffincidence/geometry.hpp"

namespace ffincidence {

/// Text form of a set, one element per line:
///
///   # ffincidence-set v1 q=<q> kind=<kind> d1=<d1> d2=<d2>
///   <fields>,<multiplicity>
///
/// kind=points: the d1 + d2 coordinates. kind=linepairs: flag,a,b per line,
/// where flag 0 means Y = aX + b and flag 1 means X = a (b = 0).
/// kind=hyperplanepairs: normal coordinates then offset, per component.
void write_set(std::ostream& out, const PointSet& s);
void write_set(std::ostream& out, const LinePairSet& s);
void write_set(std::ostream& out, const FieldSpec& field, const HyperplanePairSet& s);

/// Parsers throw std::runtime_error with the offending line number.
PointSet read_points(std::istream& in);
LinePairSet read_linepairs(std::istream& in);
HyperplanePairSet read_hyperplanepairs(std::istream& in, const FieldSpec& field);

}  // namespace ffincidence
