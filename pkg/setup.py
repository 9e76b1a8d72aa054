#!/usr/bin/env python
"""Setup script for the pe-homology package."""

from setuptools import setup

if __name__ == "__main__":
    setup()
