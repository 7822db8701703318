#pragma once

#include <mdmtj/chartable.hpp>
#include <mdmtj/errors.hpp>
#include <mdmtj/margins.hpp>
#include <mdmtj/netmodel.hpp>
#include <mdmtj/variation.hpp>
