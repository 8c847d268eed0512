#pragma once

// Everything in the library except the experiment harness.

#include <qamp/dynamic.hpp>
#include <qamp/error.hpp>
#include <qamp/grover.hpp>
#include <qamp/optimize.hpp>
#include <qamp/random.hpp>
#include <qamp/recommend.hpp>
#include <qamp/state_vector.hpp>
