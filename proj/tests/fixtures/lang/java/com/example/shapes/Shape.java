package com.example.shapes;

public abstract class Shape {
    protected final String name;

    protected Shape(String name) {
        this.name = name;
    }

    public abstract double area();

    public String describe() {
        return name + " with area " + format(area());
    }

    static String format(double v) {
        return String.format("%.2f", v);
    }
}
