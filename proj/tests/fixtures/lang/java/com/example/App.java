package com.example;

import com.example.shapes.Circle;
import com.example.shapes.Shape;

public class App {
    public static void main(String[] args) {
        Shape s = new Circle(2.0);
        System.out.println(s.describe());
        new Helper().log();
    }

    static class Helper {
        void log() {
            App.report();
        }
    }

    static void report() {
        System.out.println(1);
    }
}
