'use strict';

const { clamp } = require('./limits');

function add(a, b) {
  return clamp(a + b);
}

const square = (x) => x * x;

class Counter {
  constructor(start) {
    this.value = start;
  }

  increment() {
    this.value = add(this.value, 1);
    return this.value;
  }

  #reset = () => {
    this.value = 0;
  };
}

module.exports = { add, square, Counter };
