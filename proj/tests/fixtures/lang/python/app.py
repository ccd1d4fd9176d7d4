from pkg.util import helper, Base
from pkg import util


class Worker(Base):
    """Does work."""

    limit = 3

    def step(self):
        return helper(self.limit)

    @staticmethod
    def make():
        return Worker()


def main():
    w = Worker.make()
    data = util.scale([1, 2])
    def inner(y):
        return helper(y)
    return inner(w.run()) + len(data)


if __name__ == "__main__":
    main()
