#pragma once

// Umbrella header pulling in the whole library.

#include <ntheight/auxiliary.hpp>
#include <ntheight/elliptic.hpp>
#include <ntheight/experiments.hpp>
#include <ntheight/formal.hpp>
#include <ntheight/heights.hpp>
#include <ntheight/jets.hpp>
#include <ntheight/number_field.hpp>
#include <ntheight/places.hpp>
#include <ntheight/splitting.hpp>
#include <ntheight/version.hpp>
