import os
from math import sqrt


def helper(x):
    return sqrt(x) + 1


def scale(v, k=2):
    return [helper(i) * k for i in v]


class Base:
    def run(self):
        return self.step()

    def step(self):
        return os.getcwd()
